#include "ggr/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "ggr/entire.hpp"
#include "ggr/gabor.hpp"
#include "ggr/grid_io.hpp"
#include "ggr/signals.hpp"
#include "ggr/stability.hpp"

namespace ggr
{
    namespace
    {
        namespace fs = std::filesystem;

        [[noreturn]] void bad(const std::string& what) { fail(ErrorKind::config, what); }

        const Json& field(const Json& j, const char* key)
        {
            if (!j.is_object() || !j.contains(key))
                bad(std::string("config: missing field \"") + key + "\"");
            return j.at(key);
        }

        double number(const Json& j, const char* key)
        {
            const Json& v = field(j, key);
            if (!v.is_number())
                bad(std::string("config: field \"") + key + "\" must be a number");
            return v.get<double>();
        }

        double number_or(const Json& j, const char* key, double fallback)
        {
            return j.contains(key) ? number(j, key) : fallback;
        }

        std::string text(const Json& j, const char* key)
        {
            const Json& v = field(j, key);
            if (!v.is_string())
                bad(std::string("config: field \"") + key + "\" must be a string");
            return v.get<std::string>();
        }

        std::string text_or(const Json& j, const char* key, const std::string& fallback)
        {
            return j.contains(key) ? text(j, key) : fallback;
        }

        std::vector<double> numbers(const Json& v, const char* what)
        {
            if (!v.is_array())
                bad(std::string("config: \"") + what + "\" must be an array of numbers");
            std::vector<double> out;
            for (const Json& x : v)
            {
                if (!x.is_number())
                    bad(std::string("config: \"") + what + "\" must be an array of numbers");
                out.push_back(x.get<double>());
            }
            return out;
        }

        std::size_t count(const Json& j, const char* key)
        {
            const double v = number(j, key);
            if (!(v >= 0.0 && v == std::floor(v) && v < 1e12))
                bad(std::string("config: field \"") + key + "\" must be a nonnegative integer");
            return std::size_t(v);
        }

        Complex complex_value(const Json& v, const char* what)
        {
            if (v.is_number())
                return {v.get<double>(), 0.0};
            const auto xs = numbers(v, what);
            if (xs.size() != 2)
                bad(std::string("config: \"") + what + "\" must be a number or [re, im]");
            return {xs[0], xs[1]};
        }

        /// {"extents": [...], "spacing": h or [...], "origin": [...]?}, or the shorthand
        /// {"rank": r, "extent": n, "spacing": h}. Without an origin the grid is centred.
        GridGeometry geometry(const Json& j)
        {
            std::vector<std::size_t> ext;
            if (j.contains("extents"))
            {
                for (double e : numbers(field(j, "extents"), "extents"))
                {
                    if (!(e >= 0.0 && e == std::floor(e)))
                        bad("config: extents must be integers");
                    ext.push_back(std::size_t(e));
                }
            }
            else
                ext.assign(count(j, "rank"), count(j, "extent"));
            if (ext.empty())
                bad("config: grid needs at least one axis");

            std::vector<double> spacing;
            const Json& s = field(j, "spacing");
            if (s.is_number())
                spacing.assign(ext.size(), s.get<double>());
            else
                spacing = numbers(s, "spacing");
            if (spacing.size() != ext.size())
                bad("config: spacing must have one entry per axis");
            if (j.contains("origin"))
                return GridGeometry(ext, spacing, numbers(field(j, "origin"), "origin"));
            return GridGeometry::symmetric(ext, spacing);
        }

        fs::path input_path(const ExperimentConfig& c, const std::string& p)
        {
            const fs::path path(p);
            return path.is_absolute() ? path : c.base_dir / path;
        }

        TimeFrequencyShift shift(const Json& j, std::size_t d)
        {
            TimeFrequencyShift s;
            s.center = j.contains("center") ? numbers(j.at("center"), "center") : std::vector<double>(d, 0.0);
            s.frequency = j.contains("frequency") ? numbers(j.at("frequency"), "frequency") : std::vector<double>(d, 0.0);
            return s;
        }

        /// {"kind": gaussian | shifted_gaussian | two_bump | hermite | file, ...}
        SignalGrid signal(const ExperimentConfig& c, const Json& j, const GridGeometry* grid)
        {
            const std::string kind = text(j, "kind");
            if (kind == "file")
            {
                ComplexGrid g = read_complex_grid(input_path(c, text(j, "path")));
                GridGeometry geom = g.geometry();
                return SignalGrid(std::move(geom), std::move(g).release());
            }
            if (!grid)
                bad("config: a generated signal needs a \"grid\" block");
            const std::size_t d = j.contains("dimension") ? count(j, "dimension") : grid->rank();
            if (kind == "gaussian")
                return make_gaussian(d, *grid);
            if (kind == "shifted_gaussian")
            {
                const TimeFrequencyShift s = shift(j, d);
                return make_analytic(AnalyticSignalSpec::shifted(s.center, s.frequency), *grid);
            }
            if (kind == "two_bump")
            {
                const double sign = number_or(j, "sign", 1.0);
                return make_analytic(
                    AnalyticSignalSpec::two_bump(shift(field(j, "first"), d), shift(field(j, "second"), d), int(sign)),
                    *grid);
            }
            if (kind == "hermite")
                return make_hermite(count(j, "order"), *grid);
            bad("config: unknown signal kind \"" + kind + "\"");
        }

        SignalGrid signal_from(const ExperimentConfig& c)
        {
            const Json& p = c.params;
            std::optional<GridGeometry> grid;
            if (p.contains("grid"))
                grid = geometry(p.at("grid"));
            return signal(c, field(p, "signal"), grid ? &*grid : nullptr);
        }

        fs::path output(const RunContext& ctx, const Json& p, const char* key, const std::string& fallback)
        {
            return ctx.out_dir / text_or(p, key, fallback);
        }

        void write_text(RunResult& r, const fs::path& path, const std::string& content, ReportFormat fmt)
        {
            emit_report(content, fmt, path);
            r.artifacts.push_back(path);
        }

        std::string line(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
        std::string line(const char* fmt, ...)
        {
            char buf[512];
            va_list ap;
            va_start(ap, fmt);
            std::vsnprintf(buf, sizeof buf, fmt, ap);
            va_end(ap);
            return buf;
        }

        RunResult run_gen(const ExperimentConfig& c, const RunContext& ctx)
        {
            RunResult r;
            const SignalGrid f = signal_from(c);
            const fs::path out = output(ctx, c.params, "output", "signal.ggr");
            write_grid(out, f);
            r.artifacts.push_back(out);
            r.summary.push_back(line("gen: %zu samples, rank %zu -> %s", f.size(), f.dimension(), out.string().c_str()));
            return r;
        }

        RunResult run_gabor(const ExperimentConfig& c, const RunContext& ctx)
        {
            RunResult r;
            const Json& p = c.params;
            const double norm_p = number_or(p, "p", 2.0);
            if (!(norm_p >= 1.0))
                fail(ErrorKind::admissibility, "gabor: modulation-norm exponent must be >= 1");
            const GridGeometry pg = geometry(field(p, "phase_grid"));
            const SignalGrid f = signal_from(c);
            const PhaseSpaceGrid G = gabor_transform(f, pg);
            const Spectrogram S = spectrogram(G);
            const double norm = modulation_norm(G, norm_p);

            const fs::path out = output(ctx, p, "output", "gabor.ggr");
            write_grid(out, G);
            r.artifacts.push_back(out);
            const fs::path spec_out = output(ctx, p, "spectrogram_output", "spectrogram.ggr");
            write_grid(spec_out, static_cast<const RealGrid&>(S));
            r.artifacts.push_back(spec_out);

            Json j;
            j["p"] = json_number(norm_p);
            j["modulation_norm"] = json_number(norm);
            j["max"] = json_number(S.max_value());
            Json loc = Json::array();
            for (double v : S.argmax_location())
                loc.push_back(json_number(v));
            j["argmax_location"] = loc;
            write_text(r, output(ctx, p, "summary", "gabor.json"), dump_json(j), ReportFormat::json);
            r.summary.push_back(line("gabor: modulation norm (p=%g) %.10g, max %.10g", norm_p, norm, S.max_value()));
            return r;
        }

        LanczosOptions lanczos_options(const Json& p)
        {
            LanczosOptions o;
            if (p.contains("max_matvecs"))
                o.max_matvecs = count(p, "max_matvecs");
            return o;
        }

        RunResult run_cheeger(const ExperimentConfig& c, const RunContext& ctx)
        {
            RunResult r;
            const Json& p = c.params;
            std::optional<WeightGrid> w;
            if (p.contains("weight"))
            {
                RealGrid g = read_real_grid(input_path(c, text(field(p, "weight"), "path")));
                GridGeometry geom = g.geometry();
                w.emplace(std::move(geom), std::move(g).release());
            }
            else
            {
                const double wp = number_or(p, "p", 1.0);
                if (!(wp >= 1.0 && wp <= 2.0))
                    fail(ErrorKind::admissibility, "cheeger: weight exponent p must lie in [1, 2]");
                const double threshold = number_or(p, "mask_threshold", 1e-9);
                const GridGeometry pg = geometry(field(p, "phase_grid"));
                const Spectrogram S = spectrogram(gabor_transform(signal_from(c), pg));
                std::vector<double> vals(pg.size());
                std::vector<bool> mask(pg.size());
                for (std::size_t i = 0; i < pg.size(); ++i)
                {
                    vals[i] = std::pow(S[i], wp);
                    mask[i] = S[i] > threshold * S.max_value();
                }
                w.emplace(pg, std::move(vals), std::move(mask));
            }
            CheegerEstimate est = sweep_cut_cheeger(*w, lanczos_options(p));
            if (p.contains("oracle_block") && !est.h_oracle)
            {
                std::vector<std::size_t> block;
                for (double b : numbers(p.at("oracle_block"), "oracle_block"))
                    block.push_back(std::size_t(b));
                est.h_oracle = exhaustive_cheeger_oracle(coarsen(*w, block));
            }
            write_text(r, output(ctx, p, "output", "cheeger.json"), dump_json(to_json(est)), ReportFormat::json);
            r.summary.push_back(line("cheeger: h_upper %.10g, poincare bound %s", est.h_upper,
                                     format_double(poincare_bound(est)).c_str()));
            return r;
        }

        EntireFunctionSpec entire_function(const ExperimentConfig& c, const Json& j)
        {
            const std::string kind = text(j, "kind");
            if (kind == "polynomial")
            {
                std::vector<Complex> coeffs;
                const Json& cs = field(j, "coeffs");
                if (!cs.is_array())
                    bad("config: \"coeffs\" must be an array");
                for (const Json& x : cs)
                    coeffs.push_back(complex_value(x, "coeffs"));
                return EntireFunctionSpec::polynomial(std::move(coeffs));
            }
            if (kind == "gaussian_exp")
                return EntireFunctionSpec::gaussian_exp(complex_value(field(j, "c"), "c"),
                                                        j.contains("scale") ? complex_value(j.at("scale"), "scale") : 1.0);
            if (kind == "lifted_gabor")
            {
                std::optional<GridGeometry> grid;
                if (j.contains("grid"))
                    grid = geometry(j.at("grid"));
                const SignalGrid f = signal(c, field(j, "signal"), grid ? &*grid : nullptr);
                return EntireFunctionSpec::lifted(entire_lift(gabor_transform(f, geometry(field(j, "phase_grid")))));
            }
            bad("config: unknown function kind \"" + kind + "\"");
        }

        RunResult run_entire(const ExperimentConfig& c, const RunContext& ctx)
        {
            RunResult r;
            const Json& p = c.params;
            const double lp = number(p, "p");
            const Json& fj = field(p, "function");
            const std::size_t d = text(fj, "kind") == "lifted_gabor" ? geometry(field(fj, "phase_grid")).rank() / 2 : 1;
            if (!(lp >= 1.0 && lp < 1.0 + 1.0 / double(2 * d - 1)))
                fail(ErrorKind::admissibility, "entire: p must satisfy 1 <= p < 1 + 1/(2d-1)");
            const EntireFunctionSpec G = entire_function(c, fj);

            BallNormOptions opt;
            opt.spacing = number_or(p, "spacing", opt.spacing);
            opt.threshold = number_or(p, "threshold", opt.threshold);
            std::optional<GrowthClassSpec> growth;
            if (p.contains("alpha") || p.contains("beta"))
            {
                growth = GrowthClassSpec{number(p, "alpha"), number(p, "beta")};
                opt.growth = growth;
            }
            const std::vector<double> radii = numbers(field(p, "radii"), "radii");
            const BallNormTable t = logderiv_ball_norms(G, lp, radii, opt);
            write_text(r, output(ctx, p, "output", "ballnorms.csv"), ball_norm_csv(t), ReportFormat::csv);

            Json j = to_json(t);
            if (growth)
            {
                j["alpha"] = json_number(growth->alpha);
                j["beta"] = json_number(growth->beta);
                j["exponent"] = json_number(2.0 * double(d) + growth->beta - 1.0);
                j["growth_class"] = to_json(growth_class_check(G, *growth, radii));
            }
            if (p.contains("jensen"))
            {
                Json arr = Json::array();
                for (const Json& q : p.at("jensen"))
                {
                    const JensenResult jr = jensen_check_1d(G, complex_value(field(q, "z"), "z"), number(q, "r"));
                    Json e = to_json(jr);
                    e["r"] = json_number(number(q, "r"));
                    arr.push_back(e);
                }
                j["jensen"] = arr;
            }
            if (p.contains("zero_count_radii"))
            {
                if (!growth)
                    bad("config: zero counts need alpha and beta");
                Json arr = Json::array();
                for (double rr : numbers(p.at("zero_count_radii"), "zero_count_radii"))
                {
                    Json e = to_json(zero_count_bound_1d(G, *growth, rr));
                    e["r"] = json_number(rr);
                    arr.push_back(e);
                }
                j["zero_counts"] = arr;
            }
            write_text(r, output(ctx, p, "summary", "entire.json"), dump_json(j), ReportFormat::json);
            r.summary.push_back(line("entire: fitted slope %.6f over %zu radii, constant %.6g", t.fitted_slope,
                                     t.radii.size(), t.fitted_constant));
            return r;
        }

        std::pair<SignalGrid, SignalGrid> stability_pair(const ExperimentConfig& c, const Json& pair, std::size_t d,
                                                         const GridGeometry& grid, double T)
        {
            const std::string kind = text(pair, "kind");
            if (kind == "instability")
                return make_instability_pair(d, T, grid);
            if (kind == "perturbation")
            {
                const SignalGrid f = make_gaussian(d, grid);
                const SignalGrid h = make_hermite(count(pair, "hermite_order"), grid);
                return {f, combine(1.0, f, number(pair, "epsilon"), h)};
            }
            if (kind == "signals")
                return {signal(c, field(pair, "f"), &grid), signal(c, field(pair, "g"), &grid)};
            bad("config: unknown pair kind \"" + kind + "\"");
        }

        RunResult run_stability(const ExperimentConfig& c, const RunContext& ctx)
        {
            RunResult r;
            const Json& p = c.params;
            const std::size_t d = count(p, "dimension");
            const double lp = number(p, "p"), lq = number(p, "q");
            if (d < 1 || d > 2)
                bad("config: dimension must be 1 or 2");
            require_admissible(lp, lq, d);

            const GridGeometry grid = geometry(field(p, "grid"));
            StabilityOptions opt;
            opt.phase_geometry = geometry(field(p, "phase_grid"));
            opt.mask_threshold = number_or(p, "mask_threshold", opt.mask_threshold);
            opt.lanczos = lanczos_options(p);
            if (p.contains("oracle_block"))
            {
                std::vector<std::size_t> block;
                for (double b : numbers(p.at("oracle_block"), "oracle_block"))
                    block.push_back(std::size_t(b));
                opt.oracle_block = block;
            }
            if (p.contains("noise"))
            {
                const Json& n = p.at("noise");
                NoiseSpec ns;
                const std::string kind = text(n, "kind");
                if (kind == "gaussian_bump")
                    ns.kind = NoiseSpec::Kind::gaussian_bump;
                else if (kind == "band_limited")
                    ns.kind = NoiseSpec::Kind::band_limited;
                else
                    bad("config: unknown noise kind \"" + kind + "\"");
                ns.amplitude = number(n, "amplitude");
                ns.width = number_or(n, "width", ns.width);
                ns.bandwidth = number_or(n, "bandwidth", ns.bandwidth);
                if (n.contains("center"))
                    ns.center = numbers(n.at("center"), "center");
                ns.seed = n.contains("seed") ? std::uint64_t(count(n, "seed")) : 0;
                if (ctx.seed)
                    ns.seed = *ctx.seed;
                opt.noise = ns;
            }

            const Json& pair = field(p, "pair");
            const double T = number_or(pair, "T", 0.0);
            const auto [f, g] = stability_pair(c, pair, d, grid, T);
            const StabilityReport rep = stability_report(f, g, lp, lq, opt);
            write_text(r, output(ctx, p, "output", "stability.json"), dump_json(to_json(rep)), ReportFormat::json);
            r.summary.push_back(line("stability: lhs %.6g, h %.6g, sobolev %.6g, weighted %.6g, ratio %.6g", rep.lhs,
                                     rep.h, rep.sobolev_term, rep.weighted_term, rep.ratio));

            if (p.contains("T_sweep"))
            {
                std::vector<TSweepRow> rows;
                for (double t : numbers(p.at("T_sweep"), "T_sweep"))
                {
                    const auto [fp, fm] = make_instability_pair(d, t, grid);
                    const StabilityReport s = stability_report(fp, fm, lp, lq, opt);
                    rows.push_back({t, s.h, s.lhs, s.sobolev_term, s.weighted_term, s.empirical_ratio});
                    r.summary.push_back(line("stability sweep: T %g, h %.6g, lhs %.6g, ratio %.6g", t, s.h, s.lhs, s.empirical_ratio));
                }
                write_text(r, output(ctx, p, "sweep_output", "tsweep.csv"), tsweep_csv(rows), ReportFormat::csv);
            }
            return r;
        }
    }  // namespace

    ExperimentConfig parse_config(std::string_view text_in, const std::string& command, const fs::path& base_dir)
    {
        if (std::find(std::begin(commands), std::end(commands), command) == std::end(commands))
            bad("config: unknown command \"" + command + "\"");
        ExperimentConfig c;
        c.command = command;
        c.base_dir = base_dir;
        try
        {
            c.params = Json::parse(text_in);
        }
        catch (const nlohmann::json::exception& e)
        {
            bad(std::string("config: ") + e.what());
        }
        if (!c.params.is_object())
            bad("config: top level must be an object");
        if (c.params.contains("command") && c.params.at("command") != command)
            bad("config: \"command\" field disagrees with the subcommand");
        return c;
    }

    ExperimentConfig load_config(const fs::path& path, const std::string& command)
    {
        return parse_config(read_file(path), command, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    }

    RunResult run_config(const ExperimentConfig& config, const RunContext& context)
    {
        std::error_code ec;
        fs::create_directories(context.out_dir, ec);
        if (ec || !fs::is_directory(context.out_dir))
            fail(ErrorKind::io, "cannot create output directory " + context.out_dir.string());
        try
        {
            if (config.command == "gen")
                return run_gen(config, context);
            if (config.command == "gabor")
                return run_gabor(config, context);
            if (config.command == "cheeger")
                return run_cheeger(config, context);
            if (config.command == "entire")
                return run_entire(config, context);
            if (config.command == "stability")
                return run_stability(config, context);
        }
        catch (const nlohmann::json::exception& e)
        {
            bad(std::string("config: ") + e.what());
        }
        bad("config: unknown command \"" + config.command + "\"");
    }

    int exit_code(ErrorKind kind)
    {
        switch (kind)
        {
            case ErrorKind::config:
            case ErrorKind::invalid_argument:
                return 2;
            case ErrorKind::admissibility:
                return 3;
            case ErrorKind::non_convergence:
                return 4;
            case ErrorKind::io:
                return 5;
        }
        return 1;
    }

    int run_command(const std::string& command, const fs::path& config_path, const RunContext& context,
                    std::ostream& out, std::ostream& err)
    {
        try
        {
            const ExperimentConfig c = load_config(config_path, command);
            const RunResult r = run_config(c, context);
            for (const std::string& s : r.summary)
                out << s << '\n';
            return 0;
        }
        catch (const Error& e)
        {
            err << "error: " << e.what() << '\n';
            return exit_code(e.kind());
        }
        catch (const std::exception& e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
}  // namespace ggr
