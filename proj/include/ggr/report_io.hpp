#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggr/cheeger.hpp"
#include "ggr/entire.hpp"
#include "ggr/stability.hpp"

namespace ggr
{
    using Json = nlohmann::ordered_json;

    /// Shortest text that round-trips the double ("%.17g"); "inf", "-inf", "nan" otherwise.
    std::string format_double(double v);
    /// Finite values as numbers, the rest as the strings produced by format_double.
    Json json_number(double v);

    /// {h_upper, h_oracle?, fiedler_value, cut_mass_left, cut_mass_right, cut_weight, ...}
    Json to_json(const CheegerEstimate& estimate);
    /// {p, q, d, lhs, h_upper, sobolev_term, weighted_term, logderiv_term, ratio, ...}
    Json to_json(const StabilityReport& report);
    Json to_json(const GrowthClassReport& report);
    Json to_json(const ZeroCountResult& result);
    Json to_json(const JensenResult& result);
    /// Fit summary only; the per-radius rows go to CSV.
    Json to_json(const BallNormTable& table);

    inline constexpr const char* ball_norm_schema = "# schema ggr.ballnorm v1";
    inline constexpr const char* tsweep_schema = "# schema ggr.tsweep v1";

    /// Columns r, norm, bound, slope_so_far.
    std::string ball_norm_csv(const BallNormTable& table);

    struct TSweepRow
    {
        double T = 0.0, h = 0.0, lhs = 0.0, sobolev = 0.0, weighted = 0.0, ratio = 0.0;
    };
    /// Columns T, h, lhs, sobolev, weighted, ratio.
    std::string tsweep_csv(const std::vector<TSweepRow>& rows);

    /// JSON text with a trailing newline, keys in insertion order.
    std::string dump_json(const Json& j);

    enum class ReportFormat
    {
        json,
        csv,
    };
    /// Atomic write; ErrorKind::io on failure.
    void emit_report(const std::string& content, ReportFormat format, const std::filesystem::path& path);
}  // namespace ggr
