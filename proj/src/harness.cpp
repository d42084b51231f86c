#include "pfence/harness.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "pfence/equipartition.hpp"
#include "pfence/weighted1d.hpp"

namespace pfence {

namespace {

constexpr double kEightOverPi = 8.0 / kPi;

const std::pair<SpecKind, const char*> kKindNames[] = {
    {SpecKind::Polygon, "polygon"},
    {SpecKind::Disc, "disc"},
    {SpecKind::TruncatedDisc, "truncated_disc"},
    {SpecKind::Reuleaux, "reuleaux"},
    {SpecKind::CurvatureSamples, "curvature_samples"},
    {SpecKind::Random, "random"},
};

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

template <class T>
T param(const Json& p, const char* key, std::optional<T> fallback = std::nullopt) {
    if (!p.contains(key)) {
        if (fallback) return *fallback;
        parse_fail(std::string("missing parameter '") + key + "'");
    }
    try {
        return p.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        parse_fail(std::string("parameter '") + key + "' has the wrong type");
    }
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

SolverOptions solver_options(const HarnessOptions& o) {
    SolverOptions s;
    if (o.grid > 0) s.grid_s = o.grid;
    // Instances already run in parallel; the solver stays serial inside.
    s.threads = 1;
    return s;
}

double tol_or(const HarnessOptions& o, double fallback) { return o.tol.value_or(fallback); }

int count_or(const HarnessOptions& o, int fallback) {
    const int n = o.count.value_or(fallback);
    if (n < 0) throw Error(ErrorCode::DomainError, "count must be nonnegative");
    return n;
}

void fail(CampaignResult& r, const std::string& check, Json detail = Json::object()) {
    r.pass = false;
    Json f = Json::object();
    f["check"] = check;
    for (auto& [k, v] : detail.items()) f[k] = v;
    r.failures.push_back(std::move(f));
}

// Spearman rank correlation; ties get their mean rank.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n, mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return format_double(v.get<double>());
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

// JSON has no infinities; they are written as strings.
Json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

const char* to_string(SpecKind kind) {
    for (auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

Json BodySpec::to_json() const {
    Json j = Json::object();
    j["kind"] = to_string(kind);
    j["params"] = params;
    j["normalize"] = normalize;
    return j;
}

BodySpec BodySpec::from_json(const Json& j) {
    if (!j.is_object()) parse_fail("body spec must be an object");
    for (auto& [key, _] : j.items())
        if (key != "kind" && key != "params" && key != "normalize") parse_fail("unknown field '" + key + "'");
    if (!j.contains("kind") || !j["kind"].is_string()) parse_fail("field 'kind' must be a string");
    BodySpec s;
    const auto name = j["kind"].get<std::string>();
    bool known = false;
    for (auto& [k, n] : kKindNames)
        if (name == n) {
            s.kind = k;
            known = true;
        }
    if (!known) parse_fail("unknown kind '" + name + "'");
    if (j.contains("params")) {
        if (!j["params"].is_object()) parse_fail("field 'params' must be an object");
        s.params = j["params"];
    }
    if (j.contains("normalize")) {
        if (!j["normalize"].is_boolean()) parse_fail("field 'normalize' must be a boolean");
        s.normalize = j["normalize"].get<bool>();
    }
    return s;
}

std::vector<BodySpec> parse_body_specs(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail(e.what());
    }
    std::vector<BodySpec> out;
    if (doc.is_array()) {
        for (auto& item : doc) out.push_back(BodySpec::from_json(item));
        if (out.empty()) parse_fail("empty spec array");
    } else {
        out.push_back(BodySpec::from_json(doc));
    }
    return out;
}

std::vector<BodySpec> load_body_specs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_body_specs(ss.str());
}

ResolvedBody resolve(const BodySpec& spec) {
    const Json& p = spec.params;
    ResolvedBody out{ConvexBody2D::disc(0.5), std::nullopt};
    switch (spec.kind) {
        case SpecKind::Polygon: {
            const auto raw = param<std::vector<std::vector<double>>>(p, "vertices");
            std::vector<Point> pts;
            for (auto& v : raw) {
                if (v.size() != 2) parse_fail("vertices must be [x, y] pairs");
                pts.push_back({v[0], v[1]});
            }
            if (pts.size() < 3) throw Error(ErrorCode::DegenerateInput, "polygon needs at least 3 vertices");
            out.body = polygon_from_points(pts);
            break;
        }
        case SpecKind::Disc:
            out.body = ConvexBody2D::disc(param<double>(p, "radius", 0.5));
            break;
        case SpecKind::TruncatedDisc:
            out.body = ConvexBody2D::truncated_disc(param<double>(p, "radius", 0.5), param<double>(p, "rho"));
            break;
        case SpecKind::Reuleaux:
            out.curvature = reuleaux(param<int>(p, "n"), param<int>(p, "grid", 0));
            break;
        case SpecKind::CurvatureSamples: {
            CurvatureFn r(param<std::vector<double>>(p, "samples"));
            r.require_A1();
            out.curvature = std::move(r);
            break;
        }
        case SpecKind::Random: {
            const auto family = param<std::string>(p, "family", std::string("polygon"));
            const auto seed = param<std::uint64_t>(p, "seed");
            if (family == "polygon") {
                out.body = random_convex(seed, param<int>(p, "n"), param<double>(p, "min_inradius", 0.0));
            } else if (family == "constant_width") {
                out.curvature = random_A1(seed, param<int>(p, "grid", kDefaultGrid), param<int>(p, "max_harmonic", 15),
                                          param<double>(p, "amplitude", 0.5));
            } else {
                parse_fail("unknown random family '" + family + "'");
            }
            break;
        }
    }
    if (out.curvature) out.body = boundary_body(*out.curvature);
    if (spec.normalize) out.body = normalize_diameter(out.body);
    return out;
}

Json CampaignResult::manifest() const {
    Json j = Json::object();
    j["campaign"] = campaign;
    j["seed"] = seed;
    j["tolerances"] = tolerances;
    j["pass"] = pass;
    j["summary"] = summary;
    j["failures"] = failures;
    j["records"] = records;
    return j;
}

const std::vector<std::string>& fence_columns() {
    static const std::vector<std::string> cols{"instance_id", "kind",      "diameter",     "inradius",   "value",
                                               "fence_s1",    "fence_s2",  "sagitta",      "area_E",     "area_comp",
                                               "fence_length", "oracle_gap", "margin"};
    return cols;
}

namespace {

// margin = σ·D − 2 − (4/3)(r/D)², the scale-free form of the inradius bound.
Json fence_record(const std::string& id, const BodySpec& spec, const ConvexBody2D& body, const FenceResult& r,
                  std::optional<double> oracle) {
    const double D = diameter(body);
    const double rin = inradius(body).radius;
    const double margin = r.value * D - 2.0 - (4.0 / 3.0) * (rin / D) * (rin / D);
    Json j = Json::object();
    j["instance_id"] = id;
    j["kind"] = to_string(spec.kind);
    j["diameter"] = D;
    j["inradius"] = rin;
    j["value"] = r.value;
    j["fence_s1"] = r.fence.s1;
    j["fence_s2"] = r.fence.s2;
    j["sagitta"] = r.fence.sagitta;
    j["area_E"] = r.area_E;
    j["area_comp"] = r.area_comp;
    j["fence_length"] = r.fence_length;
    j["oracle_gap"] = oracle ? Json(*oracle - r.value) : Json(nullptr);
    j["margin"] = margin;
    j["which"] = to_string(r.which);
    j["contact_angle1"] = r.contact_angle1;
    j["contact_angle2"] = r.contact_angle2;
    j["spec"] = spec.to_json();
    return j;
}

Json fence_on(const BodySpec& spec, const ConvexBody2D& body, FenceObjective which, const HarnessOptions& o,
              const std::string& id) {
    const SolverOptions so = solver_options(o);
    const FenceResult r = which == FenceObjective::Sigma1 ? solve_sigma1(body, so) : solve_mu1(body, so);
    std::optional<double> oracle;
    if (which == FenceObjective::Sigma1) oracle = grid_oracle_sigma1(body, 32, 1);
    return fence_record(id, spec, body, r, oracle);
}

CampaignResult start(const std::string& name, const HarnessOptions& o) {
    CampaignResult r;
    r.campaign = name;
    r.seed = o.seed;
    return r;
}

}  // namespace

Json run_fence(const BodySpec& spec, FenceObjective which, const HarnessOptions& options, const std::string& instance_id) {
    return fence_on(spec, resolve(spec).body, which, options, instance_id);
}

CampaignResult campaign_fence(const std::vector<BodySpec>& specs, FenceObjective which, const HarnessOptions& options) {
    Timer t;
    auto r = start("fence", options);
    const double tol = tol_or(options, 1e-6);
    r.tolerances["margin"] = tol;
    r.columns = fence_columns();
    r.records = parallel_map<Json>(specs.size(), static_cast<unsigned>(options.threads), [&](std::size_t i) {
        return run_fence(specs[i], which, options, std::to_string(i));
    });
    for (auto& rec : r.records)
        if (rec["margin"].get<double>() < -tol) fail(r, "margin", rec);
    r.summary["which"] = to_string(which);
    r.summary["instances"] = r.records.size();
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_bonnesen(const HarnessOptions& options) {
    Timer t;
    auto r = start("bonnesen", options);
    const double tol = tol_or(options, 5e-3);
    const int count = count_or(options, 200);
    r.tolerances["margin"] = tol;
    r.columns = fence_columns();

    Rng rng(options.seed);
    std::vector<BodySpec> specs;
    for (int i = 0; i < count; ++i) {
        BodySpec s{SpecKind::Random, Json::object(), false};
        s.params["family"] = "polygon";
        s.params["seed"] = rng.next();
        s.params["n"] = 3 + static_cast<int>(rng.below(18));
        s.params["min_inradius"] = 1e-3;
        specs.push_back(std::move(s));
    }
    // Thin truncated discs, where the bound is asymptotically sharp.
    std::vector<double> thin{0.2, 0.1, 0.05, 0.02};
    if (count == 0) thin.clear();
    for (double rho : thin) {
        BodySpec s{SpecKind::TruncatedDisc, Json::object(), false};
        s.params["rho"] = rho;
        specs.push_back(std::move(s));
    }
    r.records = parallel_map<Json>(specs.size(), static_cast<unsigned>(options.threads), [&](std::size_t i) {
        return run_fence(specs[i], FenceObjective::Sigma1, options, std::to_string(i));
    });

    double min_margin = std::numeric_limits<double>::infinity();
    std::string argmin;
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < count; ++i) {
        const auto& rec = r.records[i];
        const double m = rec["margin"].get<double>();
        pts.push_back({rec["inradius"].get<double>() / rec["diameter"].get<double>(), rec["value"].get<double>()});
        if (m < min_margin) {
            min_margin = m;
            argmin = rec["instance_id"].get<std::string>();
        }
        if (m < -tol) fail(r, "margin", rec);
    }
    Json ladder = Json::array();
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < thin.size(); ++k) {
        const auto& rec = r.records[count + k];
        const double m = rec["margin"].get<double>();
        ladder.push_back({{"rho", thin[k]}, {"margin", m}});
        pts.push_back({thin[k], rec["value"].get<double>()});
        if (m < -tol) fail(r, "margin", rec);
        if (!(m < prev)) fail(r, "sharpness ladder not decreasing", rec);
        prev = m;
    }
    r.tolerances["sharpness_final"] = 1e-5;
    if (!thin.empty() && !(prev < 1e-5)) fail(r, "sharpness ladder does not approach 0", {{"final_margin", prev}});
    std::sort(pts.begin(), pts.end());
    r.series.push_back({"sigma_vs_rho", pts});
    r.summary["instances"] = count;
    r.summary["min_margin"] = count > 0 ? num(min_margin) : Json(nullptr);
    r.summary["min_margin_instance"] = argmin;
    r.summary["sharpness_ladder"] = ladder;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_constwidth(const HarnessOptions& options) {
    Timer t;
    auto r = start("constwidth", options);
    const double tol = tol_or(options, 2e-3);
    const int count = count_or(options, 50);
    r.tolerances["gap"] = tol;
    r.columns = fence_columns();
    r.columns.insert(r.columns.end(), {"gap", "l1_to_ball"});

    std::vector<BodySpec> specs;
    specs.push_back({SpecKind::Disc, Json{{"radius", 0.5}}, false});
    for (int n : {3, 5, 7}) specs.push_back({SpecKind::Reuleaux, Json{{"n", n}}, false});
    Rng rng(options.seed);
    for (int i = 0; i < count; ++i) {
        BodySpec s{SpecKind::Random, Json::object(), false};
        s.params["family"] = "constant_width";
        s.params["seed"] = rng.next();
        specs.push_back(std::move(s));
    }
    r.records = parallel_map<Json>(specs.size(), static_cast<unsigned>(options.threads), [&](std::size_t i) {
        const ResolvedBody b = resolve(specs[i]);
        Json rec = fence_on(specs[i], b.body, FenceObjective::Sigma1, options, std::to_string(i));
        rec["gap"] = rec["value"].get<double>() * rec["diameter"].get<double>() - kEightOverPi;
        rec["l1_to_ball"] = b.curvature ? l1_distance_to_ball(*b.curvature) : 0.0;
        return rec;
    });

    std::vector<double> gaps, l1s;
    std::vector<std::pair<double, double>> pts;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        const double gap = rec["gap"].get<double>(), l1 = rec["l1_to_ball"].get<double>();
        min_gap = std::min(min_gap, gap);
        if (i == 0) {
            if (std::abs(gap) > tol) fail(r, "ball is not an equality case", rec);
            continue;
        }
        gaps.push_back(gap);
        l1s.push_back(l1);
        pts.push_back({l1, gap});
        if (gap < -tol) fail(r, "below 8/pi", rec);
        else if (!(gap > 0.0)) fail(r, "not strictly above 8/pi away from the ball", rec);
    }
    std::sort(pts.begin(), pts.end());
    r.series.push_back({"gap_vs_l1", pts});
    r.summary["instances"] = r.records.size();
    r.summary["ball_gap"] = r.records[0]["gap"];
    r.summary["min_gap"] = num(min_gap);
    r.summary["spearman_gap_l1"] = gaps.size() > 1 ? spearman(l1s, gaps) : 0.0;
    r.wall_seconds = t.seconds();
    return r;
}

std::vector<double> default_series_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 12; ++i) g.push_back(0.03 * i / 12.0);
    return g;
}

SeriesFit fit_series(const std::vector<double>& rho_grid) {
    if (rho_grid.size() < 6) throw Error(ErrorCode::DomainError, "series fit needs at least 6 points");
    for (double rho : rho_grid)
        if (!(rho > 0.0 && rho <= 0.2)) throw Error(ErrorCode::DomainError, "series grid must lie in (0, 0.2]");
    const auto n = static_cast<Eigen::Index>(rho_grid.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r2 = rho_grid[i] * rho_grid[i];
        A(i, 0) = r2;
        A(i, 1) = r2 * r2;
        A(i, 2) = r2 * r2 * r2;
        y(i) = truncated_disc_sigma1_exact(rho_grid[i]) - 2.0;
    }
    const Eigen::Vector3d scale = A.colwise().norm().transpose();
    const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    const auto& s = svd.singularValues();
    const double cond = s(2) > 0.0 ? s(0) / s(2) : std::numeric_limits<double>::infinity();
    if (!(cond <= 1e8)) {
        std::ostringstream os;
        os << "design condition " << cond << " exceeds 1e8; widen the grid";
        throw Error(ErrorCode::IllConditioned, os.str());
    }
    const Eigen::Vector3d c = As.colPivHouseholderQr().solve(y).cwiseQuotient(scale);
    return {c(0), c(1), c(2), cond, (A * c - y).norm()};
}

CampaignResult campaign_series(const std::vector<double>& rho_grid, const HarnessOptions& options) {
    Timer t;
    auto r = start("series", options);
    const SeriesFit f = fit_series(rho_grid);
    const double expected[3] = {4.0 / 3.0, 76.0 / 45.0, 2648.0 / 945.0};
    const double rel_tol[3] = {1e-4, 1e-3, 1e-2};
    const double got[3] = {f.c1, f.c2, f.c3};
    r.columns = {"term", "fitted", "expected", "relative_error", "tolerance"};
    for (int k = 0; k < 3; ++k) {
        const double rel = std::abs(got[k] / expected[k] - 1.0);
        Json rec = Json::object();
        rec["term"] = "rho^" + std::to_string(2 * k + 2);
        rec["fitted"] = got[k];
        rec["expected"] = expected[k];
        rec["relative_error"] = rel;
        rec["tolerance"] = rel_tol[k];
        r.tolerances[rec["term"].get<std::string>()] = rel_tol[k];
        if (!(rel <= rel_tol[k])) fail(r, "coefficient", rec);
        r.records.push_back(std::move(rec));
    }
    std::vector<std::pair<double, double>> pts;
    for (double rho : rho_grid) pts.push_back({rho, truncated_disc_sigma1_exact(rho)});
    r.series.push_back({"sigma_vs_rho", pts});
    r.summary["grid"] = rho_grid;
    r.summary["condition"] = f.condition;
    r.summary["residual"] = f.residual;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_oned(const HarnessOptions& options, const std::vector<int>& m_values, std::size_t samples) {
    Timer t;
    auto r = start("oned", options);
    const int count = count_or(options, 200);
    const int refined = count > 0 ? std::max(1, count * 3 / 10) : 0;
    const double j_tol = 1e-9, exp_tol = 1e-8, delta = 0.1;
    r.tolerances["J_quarter"] = j_tol;
    r.tolerances["exponential"] = exp_tol;
    r.tolerances["delta"] = delta;
    r.columns = {"instance_id", "family", "m", "max_J", "bound", "margin", "lambda", "C_tilde", "ok"};
    if (m_values.empty()) throw Error(ErrorCode::DomainError, "no m values");
    for (int m : m_values)
        if (m < 1) throw Error(ErrorCode::DomainError, "m must be >= 1");

    // Weights are drawn serially so that the corpus does not depend on the
    // thread count.
    struct Task {
        std::string family;
        int m = 0;
        std::uint64_t seed = 0;
        double a = 0.0;
    };
    std::vector<Task> tasks;
    Rng rng(options.seed);
    for (int i = 0; i < count; ++i) tasks.push_back({"power_concave", m_values[i % m_values.size()], rng.next()});
    for (int i = 0; i < count; ++i) tasks.push_back({"log_concave", 0, rng.next()});
    for (int i = 0; i < refined; ++i) tasks.push_back({"refined_ii", m_values[i % m_values.size()], rng.next()});
    for (int i = 0; i < refined; ++i) tasks.push_back({"refined_iii", m_values[i % m_values.size()], rng.next()});
    for (int i = 0; i < refined; ++i) tasks.push_back({"prop1d", m_values[i % m_values.size()], rng.next()});
    for (double a : {-8.0, -2.0, 0.5, 3.0, 12.0}) tasks.push_back({"exponential", 0, 0, a});

    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.records = parallel_map<Json>(tasks.size(), static_cast<unsigned>(options.threads), [&](std::size_t i) {
        const Task& task = tasks[i];
        Rng wr(task.seed);
        double max_j = nan, bound = nan, margin = nan, lambda = nan, c_tilde = nan;
        bool ok = true;
        std::string note;
        try {
            if (task.family == "power_concave") {
                const auto w = random_power_concave(wr, task.m, samples);
                max_j = max_J(w).value;
                bound = 0.25;
                margin = bound + j_tol - max_j;
                ok = margin >= 0.0;
                sigma1_1d(w, true);
            } else if (task.family == "log_concave") {
                const auto w = random_log_concave(wr, samples);
                const auto rep = logconcave_bound_check(w);
                max_j = max_J(w).value;
                margin = -rep.max_margin;
                bound = 0.0;
                ok = rep.max_margin <= j_tol;
                sigma1_1d(w, true);
            } else if (task.family == "refined_ii") {
                const auto rep = refined_margin_ii(random_affine_product(wr, task.m, delta, samples), delta);
                lambda = rep.lambda;
                margin = rep.base_margin;
                ok = lambda > 0.0;
            } else if (task.family == "refined_iii") {
                const auto rep = refined_margin_iii(random_power_concave(wr, task.m, samples), 0.15);
                lambda = rep.lambda;
                margin = rep.base_margin;
                ok = lambda > 0.0;
            } else if (task.family == "prop1d") {
                const auto rep = prop1d_check(random_affine_product(wr, task.m, delta, samples), delta);
                max_j = 0.5 / rep.sigma;
                c_tilde = rep.C_tilde;
                ok = rep.passes && c_tilde > 0.0;
            } else {
                const double a = task.a;
                const auto w = Weight1D::sample([a](double x) { return std::exp(a * x); }, samples);
                double worst = 0.0;
                for (int k = 1; k < 200; ++k) {
                    const double x = k / 200.0;
                    const double ref =
                        (std::exp(a * x) - 1.0) * (std::exp(a) - std::exp(a * x)) / (a * (std::exp(a) - 1.0) * std::exp(a * x));
                    worst = std::max(worst, std::abs(J_rho(w, x) - ref) / ref);
                }
                max_j = max_J(w).value;
                bound = exp_tol;
                margin = exp_tol - worst;
                ok = worst <= exp_tol;
            }
        } catch (const Error& e) {
            ok = false;
            note = e.what();
        }
        Json rec = Json::object();
        rec["instance_id"] = std::to_string(i);
        rec["family"] = task.family;
        rec["m"] = task.m;
        rec["max_J"] = num(max_j);
        rec["bound"] = num(bound);
        rec["margin"] = num(margin);
        rec["lambda"] = num(lambda);
        rec["C_tilde"] = num(c_tilde);
        rec["ok"] = ok;
        if (task.family == "exponential") rec["exponent"] = task.a;
        else rec["weight_seed"] = task.seed;
        rec["samples"] = samples;
        if (!note.empty()) rec["error"] = note;
        return rec;
    });

    Json counts = Json::object(), fails = Json::object(), min_lambda = Json::object();
    for (const auto& rec : r.records) {
        const auto fam = rec["family"].get<std::string>();
        counts[fam] = counts.value(fam, 0) + 1;
        if (!rec["ok"].get<bool>()) {
            fails[fam] = fails.value(fam, 0) + 1;
            fail(r, fam, rec);
        }
        for (const char* key : {"lambda", "C_tilde"}) {
            if (!rec[key].is_number()) continue;
            const std::string k = fam + "." + key;
            const double v = rec[key].get<double>();
            if (!min_lambda.contains(k) || v < min_lambda[k].get<double>()) min_lambda[k] = v;
        }
    }
    r.summary["instances"] = counts;
    r.summary["failures"] = fails;
    r.summary["minima"] = min_lambda;
    r.summary["m_values"] = m_values;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_perturb(const std::vector<double>& eps_ladder, const HarnessOptions& options) {
    Timer t;
    auto r = start("perturb", options);
    if (eps_ladder.size() < 2) throw Error(ErrorCode::DomainError, "need at least two epsilons");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0)) throw Error(ErrorCode::DomainError, "epsilons must be positive");
        if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) throw Error(ErrorCode::DomainError, "ladder must decrease");
    }
    const double band_lo = 1.0, band_hi = 3.0, loss_bound = 2.0;
    r.tolerances["omega_band_lo"] = band_lo;
    r.tolerances["omega_band_hi"] = band_hi;
    r.tolerances["loss_over_eps_theta_max"] = loss_bound;
    r.columns = {"eps",   "theta_eps",       "Theta_eps",       "omega_eps",          "area_gain", "area_loss",
                 "ratio", "omega2_over_eps", "theta2_over_eps", "loss_over_eps_theta"};
    const CurvatureFn body = reuleaux(3);
    const auto diags = parallel_map<PerturbDiagnostics>(eps_ladder.size(), static_cast<unsigned>(options.threads),
                                                        [&](std::size_t i) { return singular_perturb(body, 0, eps_ladder[i]).diag; });
    double prev_ratio = -1.0, prev_theta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        const double eps = eps_ladder[i];
        const auto& d = diags[i];
        Json rec = Json::object();
        rec["eps"] = eps;
        rec["theta_eps"] = d.theta_eps;
        rec["Theta_eps"] = d.Theta_eps;
        rec["omega_eps"] = d.omega_eps;
        rec["area_gain"] = d.area_gain;
        rec["area_loss"] = d.area_loss;
        const double ratio = d.area_gain / d.area_loss;
        const double w2 = d.omega_eps * d.omega_eps / eps, t2 = d.theta_eps * d.theta_eps / eps;
        const double lt = d.area_loss / (eps * d.theta_eps);
        rec["ratio"] = ratio;
        rec["omega2_over_eps"] = w2;
        rec["theta2_over_eps"] = t2;
        rec["loss_over_eps_theta"] = lt;
        rec["quarter_gain"] = d.quarter_gain;
        rec["quarter_gain_closed"] = d.quarter_gain_closed;
        if (!(ratio > prev_ratio)) fail(r, "gain/loss ratio not increasing", rec);
        if (!(t2 < prev_theta)) fail(r, "theta^2/eps not decreasing", rec);
        if (!(w2 >= band_lo && w2 <= band_hi)) fail(r, "omega^2/eps outside band", rec);
        if (!(lt <= loss_bound)) fail(r, "loss/(eps theta) too large", rec);
        prev_ratio = ratio;
        prev_theta = t2;
        r.records.push_back(std::move(rec));
    }
    r.summary["body"] = BodySpec{SpecKind::Reuleaux, Json{{"n", 3}}, false}.to_json();
    r.summary["corner_index"] = 0;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_appendix(const std::vector<double>& p_ladder, double K_infinity, double ratio_threshold,
                                 const HarnessOptions& options) {
    Timer t;
    auto r = start("appendix", options);
    if (p_ladder.size() < 2) throw Error(ErrorCode::DomainError, "need at least two p values");
    for (std::size_t i = 1; i < p_ladder.size(); ++i)
        if (!(p_ladder[i] < p_ladder[i - 1])) throw Error(ErrorCode::DomainError, "p ladder must decrease");
    if (!(ratio_threshold > 0.0)) throw Error(ErrorCode::DomainError, "ratio threshold must be positive");
    r.tolerances["ratio_threshold"] = ratio_threshold;
    r.tolerances["pi_p"] = 1e-12;
    r.columns = {"p", "pi_p", "K0", "log_K0", "log_K1", "log_K2", "gamma", "log_M", "a", "log_b0", "log_K0_doubled_Kinf"};
    std::vector<double> logs, logs2;
    for (double p : p_ladder) {
        AppendixParams ap;
        ap.p = p;
        ap.K_infinity = K_infinity;
        const auto k = K0_constant(ap);
        ap.K_infinity = 2.0 * K_infinity;
        const auto k2 = K0_constant(ap);
        Json rec = Json::object();
        rec["p"] = p;
        rec["pi_p"] = pi_p(p);
        rec["K0"] = k.K0;
        rec["log_K0"] = k.log_K0;
        rec["log_K1"] = k.log_K1;
        rec["log_K2"] = k.log_K2;
        rec["gamma"] = k.gamma;
        rec["log_M"] = k.log_M;
        rec["a"] = k.a;
        rec["log_b0"] = k.log_b0;
        rec["log_K0_doubled_Kinf"] = k2.log_K0;
        logs.push_back(k.log_K0);
        logs2.push_back(k2.log_K0);
        r.records.push_back(std::move(rec));
    }
    for (std::size_t i = 1; i < logs.size(); ++i) {
        if (!(logs[i] < logs[i - 1])) fail(r, "K0 not strictly decreasing", r.records[i]);
        if ((logs2[i] < logs2[i - 1]) != (logs[i] < logs[i - 1]))
            fail(r, "doubling K_infinity changes the monotonicity", r.records[i]);
    }
    const double log_ratio = logs.back() - logs.front();
    if (!(log_ratio < std::log(ratio_threshold)))
        fail(r, "K0 ratio above threshold", {{"log_ratio", log_ratio}, {"log_threshold", std::log(ratio_threshold)}});
    const double pi2 = pi_p(2.0);
    if (!(std::abs(pi2 - kPi) <= 1e-12)) fail(r, "pi_p(2) != pi", {{"pi_p_2", pi2}});
    r.summary["K_infinity"] = K_infinity;
    r.summary["log_ratio"] = log_ratio;
    r.summary["pi_p_2"] = pi2;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_partition(int depth, const HarnessOptions& options) {
    Timer t;
    auto r = start("partition", options);
    const double c_tol = 1e-5, id_tol = 1e-4, tile_tol = 1e-9;
    r.tolerances["constraints"] = c_tol;
    r.tolerances["identity"] = id_tol;
    r.tolerances["tiling"] = tile_tol;
    r.columns = {"cell", "vertices", "area", "area_fraction", "mass_u", "mass_abs", "mass_grad", "mean_ratio"};
    EquipartitionOptions eo;
    eo.threads = options.threads;
    if (options.grid > 0) eo.grid = options.grid;
    const auto body = ConvexBody2D::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto field = sin_sin_field();
    const auto cells = equipartition(body, field, depth, eo);
    const auto areas = cell_area_report(cells);
    const auto pz = pezzetto_identity(cells, field, eo);

    double total_abs = 0.0, total_area = 0.0, worst_mean = 0.0;
    for (const auto& c : cells) {
        total_abs += c.mass_abs;
        total_area += c.polygon.area();
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        Json rec = Json::object();
        rec["cell"] = i;
        rec["vertices"] = c.polygon.vertices().size();
        rec["area"] = c.polygon.area();
        rec["area_fraction"] = areas.fractions[i];
        rec["mass_u"] = c.mass_u;
        rec["mass_abs"] = c.mass_abs;
        rec["mass_grad"] = c.mass_grad;
        rec["mean_ratio"] = c.mass_u / c.mass_abs;
        worst_mean = std::max(worst_mean, std::abs(c.mass_u) / c.mass_abs);
        if (std::abs(c.mass_u) > c_tol * c.mass_abs) fail(r, "cell mean not zero", rec);
        r.records.push_back(std::move(rec));
    }
    if (pz.mass_imbalance > c_tol) fail(r, "cell masses unequal", {{"mass_imbalance", pz.mass_imbalance}});
    if (pz.relative_error > id_tol) fail(r, "decomposition identity", {{"relative_error", pz.relative_error}});
    const double tile = std::abs(total_area - 1.0);
    if (tile > tile_tol) fail(r, "cells do not tile the square", {{"area_error", tile}});
    if (!(areas.min_fraction > 0.0)) fail(r, "empty cell", {{"min_fraction", areas.min_fraction}});
    r.summary["depth"] = depth;
    r.summary["cells"] = cells.size();
    r.summary["worst_mean_ratio"] = worst_mean;
    r.summary["mass_imbalance"] = pz.mass_imbalance;
    r.summary["identity_lhs"] = pz.lhs;
    r.summary["identity_rhs"] = pz.rhs;
    r.summary["identity_relative_error"] = pz.relative_error;
    r.summary["min_area_fraction"] = areas.min_fraction;
    r.summary["area_error"] = tile;
    r.summary["total_abs_mass"] = total_abs;
    r.wall_seconds = t.seconds();
    return r;
}

CampaignResult campaign_reference(const HarnessOptions& options) {
    Timer t;
    auto r = start("reference", options);
    r.columns = fence_columns();
    r.columns.insert(r.columns.end(), {"expected", "error", "tolerance"});
    struct Case {
        BodySpec spec;
        FenceObjective which;
        double expected;
        double tol;
    };
    const double s3 = std::sqrt(3.0);
    const BodySpec tri{SpecKind::Polygon, Json{{"vertices", {{0.0, 0.0}, {1.0, 0.0}, {0.5, s3 / 2}}}}, false};
    std::vector<Case> cases{
        {{SpecKind::Disc, Json{{"radius", 0.5}}, false}, FenceObjective::Sigma1, kEightOverPi, 1e-4},
        {{SpecKind::Disc, Json{{"radius", 0.5}}, false}, FenceObjective::Mu1, kEightOverPi, 2e-3},
        {tri, FenceObjective::Mu1, 4.0 * std::sqrt(kPi / (3.0 * s3)), 1e-3},
        {tri, FenceObjective::Sigma1, std::pow(3.0, 0.75) * std::sqrt(kPi / 2.0), 1e-3},
    };
    for (double rho : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5})
        cases.push_back({{SpecKind::TruncatedDisc, Json{{"rho", rho}}, false}, FenceObjective::Sigma1,
                         truncated_disc_sigma1_exact(rho), 1e-3});
    r.records = parallel_map<Json>(cases.size(), static_cast<unsigned>(options.threads), [&](std::size_t i) {
        Json rec = run_fence(cases[i].spec, cases[i].which, options, std::to_string(i));
        rec["expected"] = cases[i].expected;
        rec["error"] = rec["value"].get<double>() - cases[i].expected;
        rec["tolerance"] = cases[i].tol;
        return rec;
    });
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& rec = r.records[i];
        const double err = rec["error"].get<double>();
        // The triangle's σ₁ value is an upper bound, attained by a sector.
        const bool ok = i == 3 ? err <= cases[i].tol : std::abs(err) <= cases[i].tol;
        if (!ok) fail(r, "reference value", rec);
    }
    if (!(r.records[3]["value"].get<double>() < r.records[2]["value"].get<double>()))
        fail(r, "triangle sigma1 not below mu1", r.records[3]);
    r.summary["instances"] = cases.size();
    r.wall_seconds = t.seconds();
    return r;
}

const std::vector<std::string>& campaign_names() {
    static const std::vector<std::string> names{"reference", "bonnesen", "constwidth", "series",
                                                "oned",      "perturb",  "appendix",   "partition"};
    return names;
}

CampaignResult run_campaign(const std::string& name, const HarnessOptions& options) {
    if (name == "reference") return campaign_reference(options);
    if (name == "bonnesen") return campaign_bonnesen(options);
    if (name == "constwidth" || name == "cw") return campaign_constwidth(options);
    if (name == "series") return campaign_series(default_series_grid(), options);
    if (name == "oned") return campaign_oned(options);
    if (name == "perturb") return campaign_perturb({1e-2, 1e-3, 1e-4, 1e-5}, options);
    if (name == "appendix") return campaign_appendix({1.5, 1.3, 1.1, 1.05, 1.01}, 1.0, 1e-6, options);
    if (name == "partition") return campaign_partition(3, options);
    throw Error(ErrorCode::ParseError, "unknown campaign '" + name + "'");
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw Error(ErrorCode::ParseError, "format must be csv or json, got '" + name + "'");
}

std::string to_csv(const CampaignResult& result) {
    std::string out;
    for (std::size_t i = 0; i < result.columns.size(); ++i) out += (i ? "," : "") + result.columns[i];
    out += '\n';
    for (const auto& rec : result.records) {
        for (std::size_t i = 0; i < result.columns.size(); ++i) {
            if (i) out += ',';
            const auto& c = result.columns[i];
            out += rec.contains(c) ? csv_cell(rec[c]) : "";
        }
        out += '\n';
    }
    return out;
}

std::vector<std::string> emit(const CampaignResult& result, OutputFormat format, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
    std::vector<std::string> written;
    const fs::path base(dir);
    const fs::path manifest = base / (result.campaign + ".json");
    write_file(manifest, result.manifest().dump(2) + "\n");
    written.push_back(manifest.string());
    if (format == OutputFormat::Csv) {
        const fs::path csv = base / (result.campaign + ".csv");
        write_file(csv, to_csv(result));
        written.push_back(csv.string());
    }
    for (const auto& [stem, pts] : result.series) {
        const fs::path p = base / (result.campaign + "." + stem + ".dat");
        std::string text = "# x y\n";
        for (auto [x, y] : pts) text += format_double(x) + " " + format_double(y) + "\n";
        write_file(p, text);
        written.push_back(p.string());
    }
    return written;
}

}  // namespace pfence
