#include "dampde/dampde.h"

#include <exception>
#include <string>
#include <vector>

#include "dampde/errors.hpp"
#include "dampde/runner.hpp"

struct dampde_job {
    std::string config;
    dampde::JobOptions options;
    dampde::JobResult result;
    bool has_result = false;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) {
    g_last_error = msg;
}

long long parse_integer(const std::string& text) {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) {
        throw std::invalid_argument("trailing characters");
    }
    return v;
}

bool parse_flag(const std::string& text) {
    if (text == "1" || text == "true") {
        return true;
    }
    if (text == "0" || text == "false") {
        return false;
    }
    throw std::invalid_argument("expected true or false");
}

std::vector<long long> parse_integer_list(const std::string& text) {
    std::vector<long long> out;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t comma = text.find(',', begin);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        out.push_back(parse_integer(text.substr(begin, end - begin)));
        if (comma == std::string::npos) {
            break;
        }
        begin = comma + 1;
    }
    if (out.empty()) {
        throw std::invalid_argument("empty list");
    }
    return out;
}

} // namespace

extern "C" {

const char* dampde_version(void) {
    return "1.0.0";
}

const char* dampde_last_error(void) {
    return g_last_error.c_str();
}

dampde_job* dampde_job_create(void) {
    try {
        return new dampde_job();
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void dampde_job_destroy(dampde_job* job) {
    delete job;
}

dampde_status dampde_job_set_config_json(dampde_job* job, const char* json_text) {
    if (job == nullptr || json_text == nullptr) {
        set_error("null argument");
        return DAMPDE_ERR_INVALID_ARGUMENT;
    }
    job->config = json_text;
    return DAMPDE_OK;
}

dampde_status dampde_job_set_option(dampde_job* job, const char* key, const char* value) {
    if (job == nullptr || key == nullptr || value == nullptr) {
        set_error("null argument");
        return DAMPDE_ERR_INVALID_ARGUMENT;
    }
    const std::string k = key;
    const std::string v = value;
    try {
        if (k == "threads") {
            const long long t = parse_integer(v);
            if (t < 0) {
                throw std::invalid_argument("must be nonnegative");
            }
            job->options.threads = static_cast<int>(t);
        } else if (k == "svg") {
            job->options.svg = parse_flag(v);
        } else if (k == "dump-fields") {
            job->options.dump_fields = parse_flag(v);
        } else if (k == "n") {
            const long long n = parse_integer(v);
            if (n < 1) {
                throw std::invalid_argument("must be at least 1");
            }
            job->options.n = static_cast<int>(n);
        } else if (k == "m") {
            const long long m = parse_integer(v);
            if (m < 1) {
                throw std::invalid_argument("must be at least 1");
            }
            job->options.m = static_cast<std::size_t>(m);
        } else if (k == "m-list") {
            std::vector<std::size_t> list;
            for (long long e : parse_integer_list(v)) {
                if (e < 1) {
                    throw std::invalid_argument("entries must be at least 1");
                }
                list.push_back(static_cast<std::size_t>(e));
            }
            job->options.m_list = std::move(list);
        } else if (k == "n-list") {
            std::vector<int> list;
            for (long long e : parse_integer_list(v)) {
                if (e < 1) {
                    throw std::invalid_argument("entries must be at least 1");
                }
                list.push_back(static_cast<int>(e));
            }
            job->options.n_list = std::move(list);
        } else {
            set_error("unknown option \"" + k + "\"");
            return DAMPDE_ERR_INVALID_ARGUMENT;
        }
    } catch (const std::exception& e) {
        set_error("bad value for option \"" + k + "\": " + e.what());
        return DAMPDE_ERR_INVALID_ARGUMENT;
    }
    return DAMPDE_OK;
}

dampde_status dampde_job_run(dampde_job* job, const char* mode) {
    if (job == nullptr || mode == nullptr) {
        set_error("null argument");
        return DAMPDE_ERR_INVALID_ARGUMENT;
    }
    job->has_result = false;
    try {
        job->result = dampde::run_job(mode, job->config, job->options);
        job->has_result = true;
        if (job->result.numeric_failure) {
            set_error(job->result.summary);
            return DAMPDE_ERR_NUMERIC;
        }
        g_last_error.clear();
        return DAMPDE_OK;
    } catch (const dampde::ConfigError& e) {
        set_error(e.what());
        return DAMPDE_ERR_CONFIG;
    } catch (const dampde::NumericalError& e) {
        set_error(e.what());
        return DAMPDE_ERR_NUMERIC;
    } catch (const std::exception& e) {
        set_error(e.what());
        return DAMPDE_ERR_NUMERIC;
    }
}

size_t dampde_job_output_count(const dampde_job* job) {
    if (job == nullptr || !job->has_result) {
        return 0;
    }
    return job->result.outputs.size();
}

const char* dampde_job_output_name(const dampde_job* job, size_t index) {
    if (job == nullptr || !job->has_result || index >= job->result.outputs.size()) {
        return nullptr;
    }
    return job->result.outputs[index].name.c_str();
}

const char* dampde_job_output_text(const dampde_job* job, size_t index) {
    if (job == nullptr || !job->has_result || index >= job->result.outputs.size()) {
        return nullptr;
    }
    return job->result.outputs[index].text.c_str();
}

const char* dampde_job_summary(const dampde_job* job) {
    if (job == nullptr || !job->has_result) {
        return "";
    }
    return job->result.summary.c_str();
}

} // extern "C"
