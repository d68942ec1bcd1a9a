#pragma once

#include <string>
#include <vector>

#include "amg/metrics/metrics.hpp"
#include "amg/metrics/self_similarity.hpp"

namespace amg::lab {

struct HistogramSeries {
  std::string label;
  Histogram histogram;  // all series must share edges
};

/// Overlaid translucent bar histograms with a dashed line at each mean.
std::string histogram_svg(const std::string& title, const std::vector<HistogramSeries>& series);

/// Grey-scale heatmap of a self-similarity matrix, argmax cells outlined.
std::string heatmap_svg(const std::string& title, const SelfSimMatrix& m);

struct ScatterGroup {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string scatter_svg(const std::string& title, const std::vector<ScatterGroup>& groups);

}  // namespace amg::lab
