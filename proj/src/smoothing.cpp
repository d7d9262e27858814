#include "framesift/smoothing.hpp"

#include <Eigen/Dense>
#include <fftw3.h>
#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <mutex>

namespace framesift::smoothing {

void SmoothingSpec::validate() const
{
    switch (method) {
    case Method::none:
        break;
    case Method::savgol:
        if (window < 3 || window % 2 == 0)
            throw Error(fmt::format("savgol window {} must be odd and >= 3", window));
        if (polyorder < 0 || polyorder >= window)
            throw Error(fmt::format("savgol polyorder {} must be in [0, window)", polyorder));
        break;
    case Method::fft:
        if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
            throw Error(fmt::format("fft keep_fraction {} outside (0,1]", keep_fraction));
        break;
    }
}

Method parse_method(std::string_view name)
{
    if (name == "none")
        return Method::none;
    if (name == "savgol")
        return Method::savgol;
    if (name == "fft")
        return Method::fft;
    throw Error(fmt::format("unknown smoothing method '{}'", name));
}

std::string_view to_string(Method m)
{
    switch (m) {
    case Method::none:
        return "none";
    case Method::savgol:
        return "savgol";
    case Method::fft:
        return "fft";
    }
    return "?";
}

std::vector<std::vector<double>> savgol_weights(int window, int polyorder)
{
    SmoothingSpec{Method::savgol, window, polyorder, 1.0}.validate();
    const int half = window / 2;
    // Offsets scaled to [-1, 1] keep the Vandermonde matrix well conditioned.
    Eigen::MatrixXd vander(window, polyorder + 1);
    for (int r = 0; r < window; ++r) {
        const double t = static_cast<double>(r - half) / half;
        double p = 1.0;
        for (int k = 0; k <= polyorder; ++k) {
            vander(r, k) = p;
            p *= t;
        }
    }
    // Hat matrix V (V^T V)^-1 V^T via QR: V = QR  =>  H = Q Q^T.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(window, polyorder + 1);
    const Eigen::MatrixXd hat = q * q.transpose();
    std::vector<std::vector<double>> rows(window, std::vector<double>(window));
    for (int r = 0; r < window; ++r)
        for (int c = 0; c < window; ++c)
            rows[r][c] = hat(r, c);
    return rows;
}

SignalSeries savgol_smooth(const SignalSeries& series, int window, int polyorder)
{
    const auto w = savgol_weights(window, polyorder);
    const std::size_t n = series.size();
    if (n < static_cast<std::size_t>(window))
        throw Error(fmt::format("series of length {} is shorter than savgol window {}", n, window));
    const int half = window / 2;
    const auto& x = series.values;
    SignalSeries out = series;
    auto apply = [&](const std::vector<double>& weights, std::size_t start) {
        double acc = 0.0;
        for (int k = 0; k < window; ++k)
            acc += weights[k] * x[start + k];
        return acc;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i < static_cast<std::size_t>(half))
            out.values[i] = apply(w[i], 0);
        else if (i + half >= n)
            out.values[i] = apply(w[window - static_cast<int>(n - i)], n - window);
        else
            out.values[i] = apply(w[half], i - half);
    }
    return out;
}

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

SignalSeries fft_lowpass(const SignalSeries& series, double keep_fraction)
{
    SmoothingSpec{Method::fft, 3, 0, keep_fraction}.validate();
    const int n = static_cast<int>(series.size());
    if (n < 2)
        throw Error("fft_lowpass needs at least 2 samples");
    const int bins = n / 2 + 1;
    std::vector<double> real(series.values);
    std::vector<std::complex<double>> spec(bins);
    auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
    fftw_plan fwd, inv;
    {
        std::lock_guard lock(planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(n, real.data(), cspec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(n, cspec, real.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const auto cutoff = static_cast<long>(std::ceil(keep_fraction * n / 2.0));
    for (long k = cutoff + 1; k < bins; ++k)
        spec[k] = 0.0;
    fftw_execute(inv);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    SignalSeries out = series;
    for (int i = 0; i < n; ++i)
        out.values[i] = real[i] / n;
    return out;
}

SignalSeries smooth(const SignalSeries& series, const SmoothingSpec& spec)
{
    spec.validate();
    switch (spec.method) {
    case Method::none:
        return series;
    case Method::savgol:
        return savgol_smooth(series, spec.window, spec.polyorder);
    case Method::fft:
        return fft_lowpass(series, spec.keep_fraction);
    }
    return series;
}

std::vector<Peak> find_peaks(const SignalSeries& series, double min_prominence)
{
    if (min_prominence < 0.0)
        throw Error("min_prominence must be >= 0");
    const auto& v = series.values;
    const std::size_t n = v.size();
    std::vector<Peak> peaks;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (v[i] > v[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && v[j + 1] == v[i])
                ++j;
            if (j + 1 < n && v[j + 1] < v[i]) {
                Peak p;
                p.position = i;
                p.frame_index = series.frame_index[i];
                p.value = v[i];
                peaks.push_back(p);
            }
            i = j + 1;
        } else {
            ++i;
        }
    }

    // Prominence: height above the higher of the two bases, where each base
    // is the minimum between the peak and the nearest strictly higher sample
    // (or the series end) on that side.
    for (auto& p : peaks) {
        double left_min = p.value;
        for (std::size_t k = p.position; k-- > 0;) {
            if (v[k] > p.value)
                break;
            left_min = std::min(left_min, v[k]);
        }
        double right_min = p.value;
        for (std::size_t k = p.position + 1; k < n; ++k) {
            if (v[k] > p.value)
                break;
            right_min = std::min(right_min, v[k]);
        }
        p.prominence = p.value - std::max(left_min, right_min);
    }
    std::erase_if(peaks, [&](const Peak& p) { return p.prominence < min_prominence; });
    return peaks;
}

std::vector<std::int64_t> local_maxima(const SignalSeries& series, double min_prominence)
{
    std::vector<std::int64_t> out;
    for (const auto& p : find_peaks(series, min_prominence))
        out.push_back(p.frame_index);
    return out;
}

}  // namespace framesift::smoothing
