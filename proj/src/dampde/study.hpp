#pragma once

#include <optional>
#include <string>
#include <vector>

#include "field.hpp"
#include "manufactured.hpp"
#include "ocp.hpp"
#include "operators.hpp"
#include "state_solver.hpp"

namespace dampde {

enum class StudyMode { TimeRefine, SpaceRefine, OcpTimeRefine, OcpSpaceRefine };

std::string study_mode_name(StudyMode mode);

// Everything a study cell needs to pose its problem: sources, initial value,
// and whatever reference data the case can offer. Absent references leave the
// corresponding report columns empty.
struct CaseDefinition {
    ModelParams params;
    TimeFunction l;
    TimeFunction d0;
    std::optional<TimeFunction> exact_phi;
    std::optional<TimeFunction> exact_d;
    double alpha_l = 1.0;
    bool use_ld = true;  // pass l_d as the control shift in tracking problems
    std::optional<TimeFunction> phi_d;
    std::optional<TimeFunction> d_d;
    std::optional<TimeFunction> l_d;
    std::optional<TimeFunction> exact_control;
};

CaseDefinition case_from_manufactured(const ManufacturedCase& mc);

struct SolverSettings {
    double pcg_rel_tol = 1e-12;
    StepControls step;
    OptimizerConfig opt;
};

struct StudyPlan {
    StudyMode mode = StudyMode::TimeRefine;
    int fixed_n = 256;                 // time-refinement modes
    std::size_t fixed_m = 512;         // space-refinement modes
    std::vector<std::size_t> m_sweep;  // time-refinement modes, strictly increasing
    std::vector<int> n_sweep;          // space-refinement modes, strictly increasing
};

struct StudyCell {
    int n = 0;
    std::size_t m = 0;
    double tau = 0.0;
    double h_over_sqrt2 = 0.0;
    bool ok = false;
    std::string message;  // failure description when not ok
    std::optional<double> err_phi;
    std::optional<double> eoc_phi;
    std::optional<double> err_d;
    std::optional<double> eoc_d;
    std::optional<double> err_l;
    std::optional<double> eoc_l;
    std::optional<double> r_vd;
    std::optional<double> grad0_norm;
    std::optional<int> cg_iters;
    std::optional<double> objective;
    double min_state_slack = std::numeric_limits<double>::infinity();
    double min_adjoint_slack = std::numeric_limits<double>::infinity();
    double max_ratio_excess = -std::numeric_limits<double>::infinity();
    double seconds = 0.0;
};

struct StudyReport {
    StudyMode mode = StudyMode::TimeRefine;
    std::vector<StudyCell> cells;  // in sweep order
    bool numeric_failure = false;
};

// Runs every cell of the sweep (in parallel up to `threads`), records failures
// per cell without aborting, and fills the order columns from consecutive
// successful cells.
StudyReport run_study(const StudyPlan& plan, const CaseDefinition& cs,
                      const SolverSettings& settings, int threads);

// Fixed-schema CSV (6 significant digits, empty cells where not applicable):
// mode,n,M,tau,h_over_sqrt2,err_phi,eoc_phi,err_d,eoc_d,err_l,eoc_l,r_vd,cg_iters,seconds
std::string study_csv(const StudyReport& report);

// Same schema with a caller-chosen mode label, for single-run rows.
std::string cells_csv(const std::string& mode_label, const std::vector<StudyCell>& cells);

// One human-readable line per cell plus failure notes.
std::string study_summary(const StudyReport& report);

} // namespace dampde
