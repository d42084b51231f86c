#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfence/harness.hpp"

using namespace pfence;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::SolverFailed;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pfence_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

HarnessOptions serial() {
    HarnessOptions o;
    o.threads = 1;
    return o;
}

}  // namespace

TEST(BodySpec, RoundTrip) {
    const auto specs = parse_body_specs(R"([
        {"kind": "polygon", "params": {"vertices": [[0,0],[2,0],[2,1],[0,1]]}, "normalize": true},
        {"kind": "truncated_disc", "params": {"rho": 0.3}},
        {"kind": "random", "params": {"seed": 11, "n": 9}}
    ])");
    ASSERT_EQ(specs.size(), 3u);
    EXPECT_EQ(specs[0].kind, SpecKind::Polygon);
    EXPECT_TRUE(specs[0].normalize);
    EXPECT_FALSE(specs[1].normalize);
    for (const auto& s : specs) {
        const auto again = BodySpec::from_json(Json::parse(s.to_json().dump()));
        EXPECT_EQ(again.to_json().dump(), s.to_json().dump());
    }
}

TEST(BodySpec, MalformedInputs) {
    EXPECT_EQ(code_of([] { parse_body_specs("{not json"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_body_specs("[]"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_body_specs(R"({"kind": "hexagon"})"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_body_specs(R"({"kind": "disc", "colour": 1})"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { parse_body_specs(R"({"kind": "disc", "normalize": "yes"})"); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { resolve(parse_body_specs(R"({"kind": "truncated_disc"})")[0]); }), ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { resolve(parse_body_specs(R"({"kind": "disc", "params": {"radius": "big"}})")[0]); }),
              ErrorCode::ParseError);
    EXPECT_EQ(code_of([] { resolve(parse_body_specs(R"({"kind": "polygon", "params": {"vertices": [[0,0],[1,0]]}})")[0]); }),
              ErrorCode::DegenerateInput);
    EXPECT_EQ(code_of([] { resolve(parse_body_specs(R"({"kind": "reuleaux", "params": {"n": 4}})")[0]); }),
              ErrorCode::InvalidOrder);
    EXPECT_EQ(code_of([] { load_body_specs("/nonexistent/spec.json"); }), ErrorCode::IoError);
}

TEST(BodySpec, ResolvesEveryKind) {
    auto one = [](const std::string& text) { return resolve(parse_body_specs(text)[0]); };
    EXPECT_NEAR(diameter(one(R"({"kind": "disc"})").body), 1.0, 1e-12);
    EXPECT_NEAR(inradius(one(R"({"kind": "truncated_disc", "params": {"rho": 0.3}})").body).radius, 0.3, 1e-12);

    auto rect = one(R"({"kind": "polygon", "params": {"vertices": [[0,0],[1,1],[2,0],[2,1],[0,1]]}, "normalize": true})");
    EXPECT_EQ(rect.body.vertices().size(), 4u);  // (1,1) is on an edge and drops out of the hull
    EXPECT_NEAR(diameter(rect.body), 1.0, 1e-12);

    auto reu = one(R"({"kind": "reuleaux", "params": {"n": 3}})");
    ASSERT_TRUE(reu.curvature.has_value());
    EXPECT_NEAR(diameter(reu.body), 1.0, 1e-9);
    EXPECT_NEAR(min_width(reu.body), 1.0, 1e-6);

    Json samples = Json::object();
    samples["kind"] = "curvature_samples";
    samples["params"]["samples"] = reu.curvature->samples();
    auto copy = one(samples.dump());
    EXPECT_NEAR(area(copy.body), area(reu.body), 1e-12);

    auto bad = reu.curvature->samples();
    bad[0] += 0.2;
    samples["params"]["samples"] = bad;
    EXPECT_THROW(one(samples.dump()), Error);
}

TEST(BodySpec, RandomSpecsReplay) {
    auto a = resolve(parse_body_specs(R"({"kind": "random", "params": {"seed": 42, "n": 12, "min_inradius": 0.01}})")[0]);
    auto b = random_convex(42, 12, 0.01);
    ASSERT_EQ(a.body.vertices().size(), b.vertices().size());
    for (std::size_t i = 0; i < b.vertices().size(); ++i) EXPECT_EQ(a.body.vertices()[i], b.vertices()[i]);

    auto cw = resolve(parse_body_specs(R"({"kind": "random", "params": {"family": "constant_width", "seed": 5}})")[0]);
    ASSERT_TRUE(cw.curvature.has_value());
    EXPECT_EQ(cw.curvature->samples(), random_A1(5).samples());
    EXPECT_NEAR(min_width(cw.body), 1.0, 1e-6);
}

TEST(RunFence, DiscAndTruncatedDisc) {
    const auto disc = parse_body_specs(R"({"kind": "disc"})")[0];
    auto rec = run_fence(disc, FenceObjective::Sigma1, serial());
    EXPECT_NEAR(rec["value"].get<double>(), 8.0 / std::acos(-1.0), 1e-4);
    EXPECT_GE(rec["oracle_gap"].get<double>(), -1e-12);
    for (const auto& c : fence_columns()) EXPECT_TRUE(rec.contains(c)) << c;

    const auto td = parse_body_specs(R"({"kind": "truncated_disc", "params": {"rho": 0.3}})")[0];
    rec = run_fence(td, FenceObjective::Sigma1, serial());
    EXPECT_NEAR(rec["value"].get<double>(), truncated_disc_sigma1_exact(0.3), 1e-3);
    EXPECT_GT(rec["margin"].get<double>(), 0.0);

    rec = run_fence(td, FenceObjective::Mu1, serial());
    EXPECT_TRUE(rec["oracle_gap"].is_null());
    EXPECT_GE(rec["value"].get<double>(), truncated_disc_sigma1_exact(0.3) - 1e-9);
}

TEST(RunFence, MarginIsScaleFree) {
    auto small = run_fence(parse_body_specs(R"({"kind": "polygon", "params": {"vertices": [[0,0],[1,0],[0.3,0.6]]}})")[0],
                           FenceObjective::Sigma1, serial());
    auto big = run_fence(parse_body_specs(R"({"kind": "polygon", "params": {"vertices": [[0,0],[5,0],[1.5,3]]}})")[0],
                         FenceObjective::Sigma1, serial());
    EXPECT_NEAR(small["margin"].get<double>(), big["margin"].get<double>(), 1e-8);
    EXPECT_NEAR(small["value"].get<double>(), 5.0 * big["value"].get<double>(), 1e-8);
}

TEST(Series, RecoversCoefficients) {
    const auto f = fit_series(default_series_grid());
    EXPECT_NEAR(f.c1 / (4.0 / 3.0), 1.0, 1e-4);
    EXPECT_NEAR(f.c2 / (76.0 / 45.0), 1.0, 1e-3);
    EXPECT_NEAR(f.c3 / (2648.0 / 945.0), 1.0, 1e-2);
    EXPECT_TRUE(campaign_series(default_series_grid()).pass);
}

TEST(Series, GridChecks) {
    std::vector<double> narrow;
    for (int i = 0; i < 8; ++i) narrow.push_back(0.1 + 1e-7 * i);
    EXPECT_EQ(code_of([&] { fit_series(narrow); }), ErrorCode::IllConditioned);
    EXPECT_EQ(code_of([] { fit_series({0.01, 0.02, 0.03}); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([] { fit_series({0.01, 0.02, 0.03, 0.04, 0.05, 0.25}); }), ErrorCode::DomainError);
}

TEST(Bonnesen, SmallSweepPassesAndCountZeroIsEmpty) {
    auto o = serial();
    o.count = 12;
    auto r = campaign_bonnesen(o);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.records.size(), 16u);
    for (const auto& rec : r.records) EXPECT_GE(rec["margin"].get<double>(), -5e-3);

    o.count = 0;
    r = campaign_bonnesen(o);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.records.empty());

    o.count = -1;
    EXPECT_EQ(code_of([&] { campaign_bonnesen(o); }), ErrorCode::DomainError);
}

TEST(Bonnesen, FailuresCarryReplayableSpecs) {
    auto o = serial();
    o.count = 6;
    o.tol = -10.0;  // every margin is below 10, so each instance fails
    const auto r = campaign_bonnesen(o);
    EXPECT_FALSE(r.pass);
    ASSERT_FALSE(r.failures.empty());
    for (const auto& f : r.failures) {
        ASSERT_TRUE(f.contains("spec"));
        const auto again = run_fence(BodySpec::from_json(f["spec"]), FenceObjective::Sigma1, serial());
        EXPECT_EQ(again["value"].get<double>(), f["value"].get<double>());
    }
}

TEST(Determinism, SameSeedSameBytes) {
    auto o = serial();
    o.count = 8;
    const auto a = campaign_bonnesen(o);
    o.threads = 3;
    const auto b = campaign_bonnesen(o);
    EXPECT_EQ(to_csv(a), to_csv(b));
    EXPECT_EQ(a.manifest().dump(), b.manifest().dump());
    o.seed = 8;
    EXPECT_NE(to_csv(campaign_bonnesen(o)), to_csv(a));
}

TEST(Emit, WritesParsableFiles) {
    auto o = serial();
    o.count = 4;
    const auto r = campaign_constwidth(o);
    const auto dir = scratch("emit");
    const auto paths = emit(r, OutputFormat::Csv, dir.string());
    ASSERT_EQ(paths.size(), 3u);

    const auto manifest = Json::parse(slurp(dir / "constwidth.json"));
    for (const char* key : {"campaign", "seed", "tolerances", "pass", "records"}) EXPECT_TRUE(manifest.contains(key)) << key;
    EXPECT_EQ(manifest["pass"].get<bool>(), r.pass);
    EXPECT_EQ(manifest.dump(), r.manifest().dump());

    const auto csv = slurp(dir / "constwidth.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "instance_id,kind,diameter,inradius,value,fence_s1,fence_s2,sagitta,area_E,area_comp,fence_length,"
              "oracle_gap,margin,gap,l1_to_ball");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.records.size()) + 1);
    EXPECT_EQ(csv, to_csv(r));
    EXPECT_TRUE(std::filesystem::exists(dir / "constwidth.gap_vs_l1.dat"));

    const auto dir2 = scratch("emit_json");
    EXPECT_EQ(emit(r, OutputFormat::Json, dir2.string()).size(), 2u);
    EXPECT_FALSE(std::filesystem::exists(dir2 / "constwidth.csv"));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}

TEST(Emit, FormatNamesAndIoErrors) {
    EXPECT_EQ(parse_format("csv"), OutputFormat::Csv);
    EXPECT_EQ(parse_format("json"), OutputFormat::Json);
    EXPECT_EQ(code_of([] { parse_format("xml"); }), ErrorCode::ParseError);
    CampaignResult r;
    r.campaign = "x";
    EXPECT_EQ(code_of([&] { emit(r, OutputFormat::Json, "/proc/pfence_cannot_write"); }), ErrorCode::IoError);
}

TEST(ConstWidth, BallIsEquality) {
    auto o = serial();
    o.count = 2;
    const auto r = campaign_constwidth(o);
    ASSERT_EQ(r.records.size(), 6u);
    EXPECT_NEAR(r.records[0]["gap"].get<double>(), 0.0, 1e-9);
    EXPECT_EQ(r.records[0]["l1_to_ball"].get<double>(), 0.0);
    for (std::size_t i = 1; i < r.records.size(); ++i) EXPECT_GT(r.records[i]["l1_to_ball"].get<double>(), 0.0);
}

TEST(Oned, SmallCorpus) {
    auto o = serial();
    o.count = 10;
    const auto r = campaign_oned(o, {1, 2, 3}, 20001);
    int exponential = 0;
    for (const auto& rec : r.records) {
        const auto fam = rec["family"].get<std::string>();
        if (fam == "exponential") {
            ++exponential;
            continue;  // needs the default resolution
        }
        EXPECT_TRUE(rec["ok"].get<bool>()) << rec.dump();
    }
    EXPECT_EQ(exponential, 5);
    o.count = 0;
    EXPECT_TRUE(campaign_oned(o).pass);
    EXPECT_EQ(code_of([&] { campaign_oned(o, {0}); }), ErrorCode::DomainError);
}

TEST(Perturb, LadderChecks) {
    const auto r = campaign_perturb({1e-2, 1e-3, 1e-4});
    EXPECT_TRUE(r.pass);
    ASSERT_EQ(r.records.size(), 3u);
    for (const auto& rec : r.records) EXPECT_NEAR(rec["loss_over_eps_theta"].get<double>(), 1.0, 1e-2);
    EXPECT_EQ(code_of([] { campaign_perturb({1e-3, 1e-2}); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([] { campaign_perturb({1e-3}); }), ErrorCode::DomainError);
}

TEST(Appendix, TableContents) {
    const auto r = campaign_appendix({2.5, 2.0, 1.5}, 1.0, 1.0);
    ASSERT_EQ(r.records.size(), 3u);
    EXPECT_NEAR(r.records[1]["pi_p"].get<double>(), std::acos(-1.0), 1e-12);
    EXPECT_EQ(r.summary["pi_p_2"].get<double>(), pi_p(2.0));
    for (const auto& rec : r.records)
        EXPECT_LT(rec["log_K0_doubled_Kinf"].get<double>(), rec["log_K0"].get<double>());
    EXPECT_EQ(code_of([] { campaign_appendix({1.1, 1.3}); }), ErrorCode::DomainError);
}

TEST(Appendix, DecreasesCloseToOne) {
    std::vector<double> ladder;
    // Below the onset of decrease for both K_infinity and 2 K_infinity.
    for (int k = 10; k <= 16; ++k) ladder.push_back(1.0 + std::ldexp(1.0, -k));
    const auto r = campaign_appendix(ladder);
    EXPECT_TRUE(r.pass) << r.manifest()["failures"].dump();
}

TEST(Partition, DepthTwo) {
    auto o = serial();
    const auto r = campaign_partition(2, o);
    EXPECT_TRUE(r.pass) << r.manifest()["failures"].dump();
    EXPECT_EQ(r.records.size(), 4u);
    EXPECT_LT(r.summary["identity_relative_error"].get<double>(), 1e-4);
}

TEST(Campaigns, NamesDispatch) {
    for (const auto& name : campaign_names()) EXPECT_FALSE(name.empty());
    EXPECT_EQ(code_of([] { run_campaign("nope"); }), ErrorCode::ParseError);
    EXPECT_EQ(run_campaign("series").campaign, "series");
}
