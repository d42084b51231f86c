#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfence/convex2d.hpp"
#include "pfence/fence.hpp"
#include "pfence/weighted1d.hpp"
#include "pfence/widthbody.hpp"

namespace pfence {

using Json = nlohmann::ordered_json;

enum class SpecKind { Polygon, Disc, TruncatedDisc, Reuleaux, CurvatureSamples, Random };
const char* to_string(SpecKind kind);

/// One body of a spec file. `params` holds the kind-specific fields:
///   polygon           vertices: [[x, y], ...]   (hull is taken)
///   disc              radius (0.5)
///   truncated_disc    rho, the strip half-width, radius (0.5)
///   reuleaux          n (odd >= 3), grid (0 = automatic)
///   curvature_samples samples: [r_0, ..., r_{M-1}] in the class 𝒜₁
///   random            family "polygon" (default): seed, n, min_inradius (0);
///                     family "constant_width": seed, grid (4096),
///                     max_harmonic (15), amplitude (0.5)
struct BodySpec {
    SpecKind kind = SpecKind::Polygon;
    Json params = Json::object();
    bool normalize = false;

    Json to_json() const;
    static BodySpec from_json(const Json& j);
};

/// A document holding one spec object or an array of them. ParseError on
/// malformed text or fields.
std::vector<BodySpec> parse_body_specs(const std::string& text);
std::vector<BodySpec> load_body_specs(const std::string& path);

struct ResolvedBody {
    ConvexBody2D body;
    /// Set for reuleaux and curvature_samples specs.
    std::optional<CurvatureFn> curvature;
};
ResolvedBody resolve(const BodySpec& spec);

struct HarnessOptions {
    std::uint64_t seed = 7;
    /// Main tolerance of the campaign; unset means the campaign default.
    std::optional<double> tol;
    /// Fence solver boundary grid (grid_s); 0 keeps the solver default.
    int grid = 0;
    int threads = 0;
    /// Instance count for the sweeps; unset means the campaign default.
    std::optional<int> count;
};

/// Records keep a fixed key order per campaign; `columns` lists it for CSV.
/// Failed records carry the full spec under "spec".
struct CampaignResult {
    std::string campaign;
    std::uint64_t seed = 0;
    Json tolerances = Json::object();
    bool pass = true;
    std::vector<std::string> columns;
    std::vector<Json> records;
    Json summary = Json::object();
    std::vector<Json> failures;
    /// Plot-ready (x, y) series by file stem.
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
    /// Reported on stderr only, never written, so outputs stay reproducible.
    double wall_seconds = 0.0;

    Json manifest() const;
};

/// Columns of fence records.
const std::vector<std::string>& fence_columns();

Json run_fence(const BodySpec& spec, FenceObjective which, const HarnessOptions& options = {},
               const std::string& instance_id = "0");
/// run_fence over every spec of a file; pass when every margin is >= -tol
/// (default 1e-6).
CampaignResult campaign_fence(const std::vector<BodySpec>& specs, FenceObjective which,
                              const HarnessOptions& options = {});

/// Random diameter-1 polygons against σ₁ ≥ 2 + (4/3)ρ² (tol 5e-3, count 200),
/// plus a ladder of thin truncated discs where the margin tends to 0. A count
/// of 0 gives an empty passing result.
CampaignResult campaign_bonnesen(const HarnessOptions& options = {});
/// Disc, Reuleaux(3, 5, 7) and random 𝒜₁ bodies against 8/π (tol 2e-3,
/// count 50).
CampaignResult campaign_constwidth(const HarnessOptions& options = {});

struct SeriesFit {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double condition = 0.0;
    double residual = 0.0;
};
/// Default grid: 12 uniform points on (0, 0.03].
std::vector<double> default_series_grid();
/// Least-squares fit of σ(ρ) − 2 against ρ², ρ⁴, ρ⁶ for the closed-form
/// truncated disc. DomainError for points outside (0, 0.2] or fewer than 6;
/// IllConditioned when the column-scaled design has condition above 1e8.
SeriesFit fit_series(const std::vector<double>& rho_grid);
CampaignResult campaign_series(const std::vector<double>& rho_grid, const HarnessOptions& options = {});

/// Power-concave (count per m), log-concave, refined-margin and Prop-1D
/// corpora on weights with `samples` nodes.
CampaignResult campaign_oned(const HarnessOptions& options = {}, const std::vector<int>& m_values = {1, 2, 3},
                             std::size_t samples = kDefaultWeightSamples);

/// Reuleaux(3) corner perturbations along a decreasing ladder.
CampaignResult campaign_perturb(const std::vector<double>& eps_ladder = {1e-2, 1e-3, 1e-4, 1e-5},
                                const HarnessOptions& options = {});

/// K₀ along a decreasing p ladder; pass requires strict decrease and
/// K₀(last)/K₀(first) below ratio_threshold.
CampaignResult campaign_appendix(const std::vector<double>& p_ladder = {1.5, 1.3, 1.1, 1.05, 1.01},
                                 double K_infinity = 1.0, double ratio_threshold = 1e-6,
                                 const HarnessOptions& options = {});

/// sin·sin on the unit square split to the given depth; constraints at 1e-5,
/// the decomposition identity at 1e-4.
CampaignResult campaign_partition(int depth = 3, const HarnessOptions& options = {});

/// Disc, equilateral triangle and truncated discs against their known
/// constants.
CampaignResult campaign_reference(const HarnessOptions& options = {});

/// Names accepted by run_campaign.
const std::vector<std::string>& campaign_names();
/// Runs a campaign by name with default parameters.
CampaignResult run_campaign(const std::string& name, const HarnessOptions& options = {});

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& name);

/// Writes the manifest <dir>/<campaign>.json, <campaign>.csv for the csv
/// format, and <campaign>.<stem>.dat for each series. Returns the paths.
std::vector<std::string> emit(const CampaignResult& result, OutputFormat format, const std::string& dir);
std::string to_csv(const CampaignResult& result);

}  // namespace pfence
