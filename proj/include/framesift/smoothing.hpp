#pragma once

#include "framesift/signals.hpp"

#include <string_view>

namespace framesift::smoothing {

using signals::SignalSeries;

enum class Method { none, savgol, fft };

struct SmoothingSpec {
    Method method = Method::fft;
    int window = 31;            // savgol, odd
    int polyorder = 3;          // savgol, < window
    double keep_fraction = 0.05;  // fft, (0, 1]

    void validate() const;
};

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

/// Savitzky-Golay projection weights for a window. Row r holds the weights
/// that evaluate the fitted polynomial at window offset r; the middle row is
/// the ordinary smoothing kernel, the outer rows serve the series edges.
std::vector<std::vector<double>> savgol_weights(int window, int polyorder);

/// Least-squares polynomial smoothing. Edge samples are evaluated from the
/// polynomial fitted to the first/last full window.
SignalSeries savgol_smooth(const SignalSeries& series, int window, int polyorder);

/// Zeroes every DFT bin above ceil(keep_fraction * N / 2) and transforms back.
SignalSeries fft_lowpass(const SignalSeries& series, double keep_fraction);

SignalSeries smooth(const SignalSeries& series, const SmoothingSpec& spec);

struct Peak {
    std::size_t position = 0;
    std::int64_t frame_index = 0;
    double value = 0.0;
    double prominence = 0.0;

    bool operator==(const Peak&) const = default;
};

/// Strict interior local maxima. A plateau counts once, at its first index,
/// when both outside neighbours are lower. Peaks whose prominence is below
/// `min_prominence` are dropped.
std::vector<Peak> find_peaks(const SignalSeries& series, double min_prominence = 0.0);

/// Frame indices of find_peaks().
std::vector<std::int64_t> local_maxima(const SignalSeries& series, double min_prominence = 0.0);

}  // namespace framesift::smoothing
