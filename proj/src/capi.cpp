#include "pfence/pfence.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "pfence/harness.hpp"

struct pf_body {
    pfence::ConvexBody2D body;
};

struct pf_result {
    pfence::CampaignResult result;
};

namespace {

thread_local std::string g_last_error;

pf_status set_error(pf_status status, const std::string& what) {
    g_last_error = what;
    return status;
}

// Runs fn and translates exceptions into status codes.
template <class Fn>
pf_status guard(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return PF_OK;
    } catch (const pfence::Error& e) {
        return set_error(static_cast<pf_status>(static_cast<int>(e.code()) + 1), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(PF_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(PF_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(PF_E_INTERNAL, "unknown exception");
    }
}

pfence::HarnessOptions convert(const pf_options* o) {
    pfence::HarnessOptions h;
    if (!o) return h;
    h.seed = o->seed;
    if (!std::isnan(o->tol)) h.tol = o->tol;
    h.grid = o->grid;
    h.threads = o->threads;
    if (o->count >= 0) h.count = o->count;
    return h;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

pf_status null_arg(const char* what) { return set_error(PF_E_INVALID_ARGUMENT, std::string(what) + " is null"); }

template <class Fn>
pf_status make_result(pf_result** out, Fn&& fn) {
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] { *out = new pf_result{fn()}; });
}

}  // namespace

extern "C" {

const char* pf_version(void) { return "1.0.0"; }

const char* pf_status_string(pf_status status) {
    if (status == PF_OK) return "ok";
    if (status == PF_E_INVALID_ARGUMENT) return "invalid_argument";
    if (status == PF_E_INTERNAL) return "internal";
    if (status >= PF_E_DEGENERATE_INPUT && status <= PF_E_IO)
        return pfence::to_string(static_cast<pfence::ErrorCode>(static_cast<int>(status) - 1));
    return "unknown";
}

int pf_status_is_input_error(pf_status status) {
    switch (status) {
        case PF_E_DEGENERATE_INPUT:
        case PF_E_INVALID_ORDER:
        case PF_E_GRID_MISMATCH:
        case PF_E_CLOSURE_VIOLATION:
        case PF_E_NOT_A_ZERO_POINT:
        case PF_E_INVALID_FENCE:
        case PF_E_DOMAIN:
        case PF_E_NOT_LOG_CONCAVE:
        case PF_E_ILL_CONDITIONED:
        case PF_E_PARSE:
        case PF_E_IO:
        case PF_E_INVALID_ARGUMENT:
            return 1;
        default:
            return 0;
    }
}

const char* pf_last_error(void) { return g_last_error.c_str(); }

void pf_options_default(pf_options* options) {
    if (!options) return;
    options->seed = pfence::HarnessOptions{}.seed;
    options->tol = std::nan("");
    options->grid = 0;
    options->threads = 0;
    options->count = -1;
}

pf_status pf_body_from_json(const char* spec_json, pf_body** out) {
    if (!spec_json) return null_arg("spec_json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guard([&] {
        const auto specs = pfence::parse_body_specs(spec_json);
        if (specs.size() != 1) throw pfence::Error(pfence::ErrorCode::ParseError, "expected a single body spec");
        *out = new pf_body{pfence::resolve(specs[0]).body};
    });
}

void pf_body_free(pf_body* body) { delete body; }

pf_status pf_body_diameter(const pf_body* body, double* out) {
    if (!body || !out) return null_arg("argument");
    return guard([&] { *out = pfence::diameter(body->body); });
}

pf_status pf_body_area(const pf_body* body, double* out) {
    if (!body || !out) return null_arg("argument");
    return guard([&] { *out = pfence::area(body->body); });
}

pf_status pf_body_inradius(const pf_body* body, double* out) {
    if (!body || !out) return null_arg("argument");
    return guard([&] { *out = pfence::inradius(body->body).radius; });
}

pf_status pf_body_solve(const pf_body* body, pf_objective which, const pf_options* options, pf_fence_result* out) {
    if (!body || !out) return null_arg("argument");
    if (which != PF_SIGMA1 && which != PF_MU1) return set_error(PF_E_INVALID_ARGUMENT, "unknown objective");
    return guard([&] {
        pfence::SolverOptions so;
        if (options) {
            if (options->grid > 0) so.grid_s = options->grid;
            so.threads = options->threads;
        }
        const auto r = which == PF_SIGMA1 ? pfence::solve_sigma1(body->body, so) : pfence::solve_mu1(body->body, so);
        *out = {r.value,  r.fence.s1,  r.fence.s2,      r.fence.sagitta,  r.area_E,
                r.area_comp, r.fence_length, r.contact_angle1, r.contact_angle2};
    });
}

pf_status pf_truncated_disc_sigma1(double rho, double* out) {
    if (!out) return null_arg("out");
    return guard([&] { *out = pfence::truncated_disc_sigma1_exact(rho); });
}

pf_status pf_fit_series(const double* rho, size_t n, double coeffs[3]) {
    if ((!rho && n > 0) || !coeffs) return null_arg("argument");
    return guard([&] {
        const auto f = pfence::fit_series(std::vector<double>(rho, rho + n));
        coeffs[0] = f.c1;
        coeffs[1] = f.c2;
        coeffs[2] = f.c3;
    });
}

pf_status pf_campaign_run(const char* name, const pf_options* options, pf_result** out) {
    if (!name) return null_arg("name");
    return make_result(out, [&] { return pfence::run_campaign(name, convert(options)); });
}

pf_status pf_campaign_fence(const char* specs_json, pf_objective which, const pf_options* options, pf_result** out) {
    if (!specs_json) return null_arg("specs_json");
    if (which != PF_SIGMA1 && which != PF_MU1) return set_error(PF_E_INVALID_ARGUMENT, "unknown objective");
    return make_result(out, [&] {
        return pfence::campaign_fence(pfence::parse_body_specs(specs_json),
                                      which == PF_SIGMA1 ? pfence::FenceObjective::Sigma1 : pfence::FenceObjective::Mu1,
                                      convert(options));
    });
}

pf_status pf_campaign_series(const double* rho, size_t n, const pf_options* options, pf_result** out) {
    if (!rho && n > 0) return null_arg("rho");
    return make_result(out, [&] {
        return pfence::campaign_series(n ? std::vector<double>(rho, rho + n) : pfence::default_series_grid(),
                                       convert(options));
    });
}

pf_status pf_campaign_perturb(const double* eps, size_t n, const pf_options* options, pf_result** out) {
    if (!eps && n > 0) return null_arg("eps");
    return make_result(out, [&] {
        return n ? pfence::campaign_perturb(std::vector<double>(eps, eps + n), convert(options))
                 : pfence::campaign_perturb({1e-2, 1e-3, 1e-4, 1e-5}, convert(options));
    });
}

pf_status pf_campaign_appendix(const double* p, size_t n, double k_infinity, double ratio_threshold,
                               const pf_options* options, pf_result** out) {
    if (!p && n > 0) return null_arg("p");
    return make_result(out, [&] {
        const std::vector<double> ladder = n ? std::vector<double>(p, p + n) : std::vector<double>{1.5, 1.3, 1.1, 1.05, 1.01};
        return pfence::campaign_appendix(ladder, k_infinity, ratio_threshold, convert(options));
    });
}

pf_status pf_campaign_partition(int depth, const pf_options* options, pf_result** out) {
    return make_result(out, [&] { return pfence::campaign_partition(depth, convert(options)); });
}

int pf_result_passed(const pf_result* result) { return result && result->result.pass ? 1 : 0; }

size_t pf_result_record_count(const pf_result* result) { return result ? result->result.records.size() : 0; }

double pf_result_wall_seconds(const pf_result* result) { return result ? result->result.wall_seconds : 0.0; }

pf_status pf_result_manifest(const pf_result* result, char** out) {
    if (!result || !out) return null_arg("argument");
    *out = nullptr;
    return guard([&] { *out = copy_string(result->result.manifest().dump(2)); });
}

pf_status pf_result_csv(const pf_result* result, char** out) {
    if (!result || !out) return null_arg("argument");
    *out = nullptr;
    return guard([&] { *out = copy_string(pfence::to_csv(result->result)); });
}

pf_status pf_result_emit(const pf_result* result, pf_format format, const char* dir) {
    if (!result || !dir) return null_arg("argument");
    if (format != PF_FORMAT_CSV && format != PF_FORMAT_JSON) return set_error(PF_E_INVALID_ARGUMENT, "unknown format");
    return guard([&] {
        pfence::emit(result->result, format == PF_FORMAT_CSV ? pfence::OutputFormat::Csv : pfence::OutputFormat::Json, dir);
    });
}

void pf_result_free(pf_result* result) { delete result; }

void pf_string_free(char* s) { std::free(s); }

}  // extern "C"
