// Command-line front end over the C API.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfence/pfence.h"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kInputError = 2, kInternalError = 3 };

struct Globals {
    uint64_t seed = 7;
    double tol = std::nan("");
    int grid = 0;
    int threads = 0;
    int count = -1;
    std::string out;
    std::string format = "csv";
};

// Human-readable message on stderr, a JSON error object on stdout.
int status_exit(pf_status s, const std::string& message) {
    const int code = pf_status_is_input_error(s) ? kInputError : kInternalError;
    std::cerr << "error: " << message << "\n";
    nlohmann::ordered_json j;
    j["error"] = {{"status", pf_status_string(s)}, {"message", message}, {"exit_code", code}};
    std::cout << j.dump() << "\n";
    return code;
}

int status_exit(pf_status s) { return status_exit(s, pf_last_error()); }

pf_options options_of(const Globals& g) {
    pf_options o;
    pf_options_default(&o);
    o.seed = g.seed;
    o.tol = g.tol;
    o.grid = g.grid;
    o.threads = g.threads;
    o.count = g.count;
    return o;
}

// Writes the files (or the manifest to stdout without --out) and maps the
// verdict to an exit code. The result is released here.
template <class Run>
int finish(Run&& run, const Globals& g) {
    pf_result* r = nullptr;
    pf_status s = run(&r);
    if (s != PF_OK) return status_exit(s);
    int code = pf_result_passed(r) ? kPass : kCheckFailed;
    if (g.out.empty()) {
        char* text = nullptr;
        s = pf_result_manifest(r, &text);
        if (s == PF_OK) std::cout << text << "\n";
        pf_string_free(text);
    } else {
        s = pf_result_emit(r, g.format == "json" ? PF_FORMAT_JSON : PF_FORMAT_CSV, g.out.c_str());
    }
    if (s != PF_OK) code = status_exit(s);
    std::cerr << (code == kPass ? "PASS" : "FAIL") << " (" << pf_result_record_count(r) << " records, "
              << pf_result_wall_seconds(r) << " s)\n";
    pf_result_free(r);
    return code;
}

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fence-solver verification campaigns", "pfence"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--tol", g.tol, "Main check tolerance (campaign default when omitted)");
    app.add_option("--grid", g.grid, "Solver boundary grid, or integrator grid for partition (0 = default)");
    app.add_option("--threads", g.threads, "Worker threads (0 = auto)")->capture_default_str();
    app.add_option("--count", g.count, "Sweep instance count (campaign default when omitted)");
    app.add_option("--out", g.out, "Output directory; the manifest goes to stdout when omitted");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    std::string spec_path, which = "sigma1";
    auto* fence = app.add_subcommand("fence", "Solve the fence problem for the bodies in a spec file");
    fence->add_option("spec", spec_path, "Body spec file (JSON object or array)")->required();
    fence->add_option("--which", which, "Objective")->check(CLI::IsMember({"sigma1", "mu1"}))->capture_default_str();

    auto* cw = app.add_subcommand("cw", "Constant-width sweep against 8/pi");
    auto* oned = app.add_subcommand("oned", "One-dimensional weight corpus");

    int depth = 3;
    auto* partition = app.add_subcommand("partition", "Equipartition of sin*sin on the unit square");
    partition->add_option("--depth", depth, "Bisection depth")->capture_default_str();

    std::vector<double> eps;
    auto* perturb = app.add_subcommand("perturb", "Reuleaux corner perturbations");
    perturb->add_option("--eps", eps, "Decreasing epsilon ladder")->delimiter(',');

    std::vector<double> ps;
    double k_inf = 1.0, ratio = 1e-6;
    auto* appendix = app.add_subcommand("appendix", "K0 along a decreasing p ladder");
    appendix->add_option("--p", ps, "Decreasing p ladder")->delimiter(',');
    appendix->add_option("--k-inf", k_inf, "K_infinity")->capture_default_str();
    appendix->add_option("--ratio", ratio, "Threshold for K0(last)/K0(first)")->capture_default_str();

    std::string campaign;
    auto* verify = app.add_subcommand("verify", "Run a named campaign, or all of them");
    verify->add_option("campaign", campaign,
                       "reference, bonnesen, constwidth, series, oned, perturb, appendix, partition or all")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    const pf_options opt = options_of(g);
    if (*fence) {
        std::string text;
        if (!read_file(spec_path, text)) return status_exit(PF_E_IO, "cannot read " + spec_path);
        const pf_objective obj = which == "mu1" ? PF_MU1 : PF_SIGMA1;
        return finish([&](pf_result** r) { return pf_campaign_fence(text.c_str(), obj, &opt, r); }, g);
    }
    auto named = [&](const char* name) { return [&opt, name](pf_result** r) { return pf_campaign_run(name, &opt, r); }; };
    if (*cw) return finish(named("constwidth"), g);
    if (*oned) return finish(named("oned"), g);
    if (*partition) return finish([&](pf_result** r) { return pf_campaign_partition(depth, &opt, r); }, g);
    if (*perturb) return finish([&](pf_result** r) { return pf_campaign_perturb(eps.data(), eps.size(), &opt, r); }, g);
    if (*appendix)
        return finish([&](pf_result** r) { return pf_campaign_appendix(ps.data(), ps.size(), k_inf, ratio, &opt, r); }, g);

    if (campaign != "all") return finish(named(campaign.c_str()), g);
    static const char* all[] = {"reference", "bonnesen", "constwidth", "series", "oned", "perturb", "appendix", "partition"};
    int worst = kPass;
    for (const char* name : all) {
        std::cerr << name << ": ";
        const int code = finish(named(name), g);
        worst = std::max(worst, code);
    }
    return worst;
}
