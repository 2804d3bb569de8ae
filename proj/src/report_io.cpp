#include "ggr/report_io.hpp"

#include <cmath>
#include <cstdio>

#include "ggr/grid_io.hpp"

namespace ggr
{
    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    Json json_number(double v)
    {
        if (std::isfinite(v))
            return v;
        return format_double(v);
    }

    namespace
    {
        Json vec(const std::vector<double>& v)
        {
            Json a = Json::array();
            for (double x : v)
                a.push_back(json_number(x));
            return a;
        }
    }  // namespace

    Json to_json(const CheegerEstimate& e)
    {
        Json j;
        j["h_upper"] = json_number(e.h_upper);
        if (e.h_oracle)
            j["h_oracle"] = json_number(*e.h_oracle);
        j["fiedler_value"] = json_number(e.fiedler_value);
        j["cut_mass_left"] = json_number(e.best_cut.mass_in);
        j["cut_mass_right"] = json_number(e.best_cut.mass_out);
        j["cut_weight"] = json_number(e.best_cut.cut_weight);
        j["poincare_bound"] = json_number(poincare_bound(e));
        j["disconnected"] = e.disconnected;
        if (!e.diagnostic.empty())
            j["diagnostic"] = e.diagnostic;
        return j;
    }

    Json to_json(const StabilityReport& r)
    {
        Json j;
        j["p"] = json_number(r.p);
        j["q"] = json_number(r.q);
        j["d"] = r.d;
        j["lhs"] = json_number(r.lhs);
        j["theta"] = json_number(r.theta);
        j["h_upper"] = json_number(r.h_upper);
        if (r.h_oracle)
            j["h_oracle"] = json_number(*r.h_oracle);
        j["h"] = json_number(r.h);
        j["disconnected"] = r.disconnected;
        j["poincare_bound"] = json_number(r.poincare_bound);
        j["value_term"] = json_number(r.value_term);
        j["gradient_term"] = json_number(r.gradient_term);
        j["sobolev_term"] = json_number(r.sobolev_term);
        j["weighted_term"] = json_number(r.weighted_term);
        j["logderiv_term"] = json_number(r.logderiv_term);
        j["logderiv_excluded_fraction"] = json_number(r.logderiv_excluded_fraction);
        j["rhs_thm23"] = json_number(r.rhs_thm23);
        j["rhs_thm44_shape"] = json_number(r.rhs_thm44_shape);
        j["ratio"] = json_number(r.ratio);
        j["empirical_ratio"] = json_number(r.empirical_ratio);
        j["z0"] = vec(r.z0);
        j["active_cells"] = r.active_cells;
        if (r.noise)
        {
            Json n;
            n["epsilon"] = json_number(r.noise->epsilon);
            n["gamma_dnorm"] = json_number(r.noise->gamma_dnorm);
            n["bound_shape"] = json_number(r.noise->bound_shape);
            j["noise"] = n;
        }
        return j;
    }

    Json to_json(const GrowthClassReport& r)
    {
        Json j;
        j["member"] = r.member;
        j["worst_margin"] = json_number(r.worst_margin);
        j["worst_radius"] = json_number(r.worst_radius);
        return j;
    }

    Json to_json(const ZeroCountResult& r)
    {
        Json j;
        j["count"] = r.count;
        j["contour_count"] = r.contour_count;
        j["bound"] = json_number(r.bound);
        j["holds"] = r.holds;
        return j;
    }

    Json to_json(const JensenResult& r)
    {
        Json j;
        j["lhs"] = json_number(r.lhs);
        j["circle_term"] = json_number(r.circle_term);
        j["zero_correction"] = json_number(r.zero_correction);
        j["residual"] = json_number(r.residual);
        return j;
    }

    Json to_json(const BallNormTable& t)
    {
        Json j;
        j["d"] = t.dimension;
        j["p"] = json_number(t.p);
        j["fitted_slope"] = json_number(t.fitted_slope);
        j["fitted_constant"] = json_number(t.fitted_constant);
        j["excluded_fraction"] = json_number(t.excluded_fraction);
        return j;
    }

    std::string ball_norm_csv(const BallNormTable& t)
    {
        std::string out = std::string(ball_norm_schema) + "\nr,norm,bound,slope_so_far\n";
        for (std::size_t k = 0; k < t.radii.size(); ++k)
            out += format_double(t.radii[k]) + "," + format_double(t.norms[k]) + "," + format_double(t.bounds[k]) + "," +
                   format_double(t.slopes_so_far[k]) + "\n";
        return out;
    }

    std::string tsweep_csv(const std::vector<TSweepRow>& rows)
    {
        std::string out = std::string(tsweep_schema) + "\nT,h,lhs,sobolev,weighted,ratio\n";
        for (const TSweepRow& r : rows)
            out += format_double(r.T) + "," + format_double(r.h) + "," + format_double(r.lhs) + "," +
                   format_double(r.sobolev) + "," + format_double(r.weighted) + "," + format_double(r.ratio) + "\n";
        return out;
    }

    std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

    void emit_report(const std::string& content, ReportFormat, const std::filesystem::path& path)
    {
        write_file_atomic(path, content);
    }
}  // namespace ggr
