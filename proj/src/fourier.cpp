#include "ggr/fourier.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace ggr
{
    namespace
    {
        using std::numbers::pi;

        // FFTW's planner is not re-entrant.
        std::mutex& planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        /// exp(-2 pi i x), reducing x mod 1 first.
        Complex unit_phase(double x)
        {
            x -= std::round(x);
            return std::polar(1.0, -2.0 * pi * x);
        }

        struct FftwBuffer
        {
            explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n)
            {
                if (!data)
                    throw std::bad_alloc();
            }
            ~FftwBuffer() { fftw_free(data); }
            FftwBuffer(const FftwBuffer&) = delete;
            FftwBuffer& operator=(const FftwBuffer&) = delete;

            Complex* c() { return reinterpret_cast<Complex*>(data); }
            void zero() { std::memset(data, 0, size * sizeof(fftw_complex)); }

            fftw_complex* data;
            std::size_t size;
        };

        std::size_t next_pow2(std::size_t n)
        {
            std::size_t p = 1;
            while (p < n)
                p <<= 1;
            return p;
        }
    }  // namespace

    struct FrequencySampler::Plans
    {
        fftw_plan forward = nullptr;
        fftw_plan backward = nullptr;
        std::vector<Complex> kernel_hat;  // chirp mode: FFT of the conjugate chirp, pre-scaled by 1/L

        ~Plans()
        {
            std::lock_guard lock(planner_mutex());
            if (forward)
                fftw_destroy_plan(forward);
            if (backward)
                fftw_destroy_plan(backward);
        }
    };

    FrequencySampler::FrequencySampler(std::size_t in_count, double t0, double step, std::size_t out_count, double y0,
                                       double dy)
        : in_count_(in_count), out_count_(out_count), plans_(std::make_unique<Plans>())
    {
        require(in_count >= 1 && out_count >= 1, "fourier: empty grid");
        require(step > 0.0 && dy > 0.0 && std::isfinite(step * dy), "fourier: spacings must be positive");

        pre_.resize(in_count);
        for (std::size_t k = 0; k < in_count; ++k)
            pre_[k] = unit_phase(double(k) * step * y0);
        post_.resize(out_count);
        for (std::size_t j = 0; j < out_count; ++j)
            post_[j] = step * unit_phase(t0 * (y0 + double(j) * dy));

        const double ratio = 1.0 / (step * dy);
        const double rounded = std::round(ratio);
        chirp_ = !(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-13 * ratio);

        if (!chirp_)
        {
            length_ = std::size_t(rounded);
            FftwBuffer a(length_), b(length_);
            std::lock_guard lock(planner_mutex());
            plans_->forward = fftw_plan_dft_1d(int(length_), a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
            return;
        }

        // Bluestein: kj = (k^2 + j^2 - (j-k)^2) / 2.
        const double r = step * dy;
        length_ = next_pow2(in_count + out_count - 1);
        const std::size_t span = std::max(in_count, out_count);
        chirp_w_.resize(span);
        for (std::size_t k = 0; k < span; ++k)
        {
            // exp(-i pi r k^2) = exp(-2 pi i (r k^2 / 2)); reduce r k^2 / 2 mod 1 in two steps
            // so the k^2 factor does not swamp the phase.
            const double kk = double(k) * double(k);
            const double half = std::fmod(kk, 2.0 / r) * r * 0.5;
            chirp_w_[k] = unit_phase(half);
        }

        FftwBuffer a(length_), b(length_);
        {
            std::lock_guard lock(planner_mutex());
            plans_->forward = fftw_plan_dft_1d(int(length_), a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
            plans_->backward = fftw_plan_dft_1d(int(length_), a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        a.zero();
        Complex* ka = a.c();
        for (std::size_t m = 0; m < out_count; ++m)
            ka[m] = std::conj(chirp_w_[m]);
        for (std::size_t m = 1; m < in_count; ++m)
            ka[length_ - m] = std::conj(chirp_w_[m]);
        fftw_execute_dft(plans_->forward, a.data, b.data);
        plans_->kernel_hat.assign(b.c(), b.c() + length_);
        for (auto& v : plans_->kernel_hat)
            v /= double(length_);
    }

    FrequencySampler::~FrequencySampler() = default;
    FrequencySampler::FrequencySampler(FrequencySampler&&) noexcept = default;
    FrequencySampler& FrequencySampler::operator=(FrequencySampler&&) noexcept = default;

    void FrequencySampler::apply(std::span<const Complex> in, std::span<Complex> out) const
    {
        require(in.size() == in_count_ && out.size() == out_count_, "fourier: buffer size mismatch");
        FftwBuffer a(length_), b(length_);
        a.zero();
        Complex* av = a.c();
        if (!chirp_)
        {
            for (std::size_t k = 0; k < in_count_; ++k)
                av[k % length_] += in[k] * pre_[k];
            fftw_execute_dft(plans_->forward, a.data, b.data);
            const Complex* bv = b.c();
            for (std::size_t j = 0; j < out_count_; ++j)
                out[j] = bv[j % length_] * post_[j];
            return;
        }
        for (std::size_t k = 0; k < in_count_; ++k)
            av[k] = in[k] * pre_[k] * chirp_w_[k];
        fftw_execute_dft(plans_->forward, a.data, b.data);
        Complex* bv = b.c();
        for (std::size_t m = 0; m < length_; ++m)
            bv[m] *= plans_->kernel_hat[m];
        fftw_execute_dft(plans_->backward, b.data, a.data);
        for (std::size_t j = 0; j < out_count_; ++j)
            out[j] = av[j] * chirp_w_[j] * post_[j];
    }
}  // namespace ggr
