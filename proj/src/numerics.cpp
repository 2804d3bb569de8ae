#include "ggr/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace ggr
{
    namespace
    {
        std::atomic<std::size_t> g_threads{1};
    }

    void set_thread_count(std::size_t n) { g_threads = std::max<std::size_t>(1, n); }

    std::size_t thread_count() { return g_threads; }

    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
    {
        const std::size_t workers = std::min(thread_count(), n);
        if (workers <= 1)
        {
            if (n > 0)
                body(0, n);
            return;
        }
        std::vector<std::thread> pool;
        pool.reserve(workers);
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try
                {
                    if (begin < end)
                        body(begin, end);
                }
                catch (...)
                {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    double lp_norm(std::span<const double> magnitudes, double p, double cell_volume, const std::vector<bool>& mask)
    {
        require(p >= 1.0 && std::isfinite(p), "lp_norm: p must be finite and >= 1");
        require(mask.size() == magnitudes.size(), "lp_norm: mask size mismatch");
        CompensatedSum acc;
        for (std::size_t i = 0; i < magnitudes.size(); ++i)
            if (mask[i])
                acc += std::pow(std::abs(magnitudes[i]), p);
        const double s = acc.value() * cell_volume;
        return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
    }

    std::vector<double> gradient_magnitude(const std::vector<std::vector<double>>& grad)
    {
        std::vector<double> out(grad.empty() ? 0 : grad[0].size(), 0.0);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            double s = 0.0;
            for (const auto& g : grad)
                s += g[i] * g[i];
            out[i] = std::sqrt(s);
        }
        return out;
    }

    std::vector<double> gradient_magnitude(const std::vector<std::vector<Complex>>& grad)
    {
        std::vector<double> out(grad.empty() ? 0 : grad[0].size(), 0.0);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            double s = 0.0;
            for (const auto& g : grad)
                s += std::norm(g[i]);
            out[i] = std::sqrt(s);
        }
        return out;
    }

    namespace
    {
        std::vector<std::vector<Complex>> wirtinger(const std::vector<std::vector<Complex>>& grad, double sign)
        {
            require(grad.size() % 2 == 0, "wirtinger: phase-space rank must be even");
            const Complex i_unit(0.0, sign);
            std::vector<std::vector<Complex>> out(grad.size() / 2);
            for (std::size_t j = 0; j < out.size(); ++j)
            {
                const auto& dx = grad[2 * j];
                const auto& dy = grad[2 * j + 1];
                out[j].resize(dx.size());
                for (std::size_t i = 0; i < dx.size(); ++i)
                    out[j][i] = 0.5 * (dx[i] + i_unit * dy[i]);
            }
            return out;
        }
    }  // namespace

    std::vector<std::vector<Complex>> wirtinger_dz(const std::vector<std::vector<Complex>>& grad)
    {
        return wirtinger(grad, -1.0);
    }

    std::vector<std::vector<Complex>> wirtinger_dzbar(const std::vector<std::vector<Complex>>& grad)
    {
        return wirtinger(grad, 1.0);
    }

    LineFit fit_line(std::span<const double> x, std::span<const double> y)
    {
        require(x.size() == y.size() && x.size() >= 2, "fit_line: need at least two points");
        const double n = double(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            mx += x[i];
            my += y[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        require(sxx > 0.0, "fit_line: abscissae must not all coincide");
        LineFit fit;
        fit.slope = sxy / sxx;
        fit.intercept = my - fit.slope * mx;
        return fit;
    }
}  // namespace ggr
