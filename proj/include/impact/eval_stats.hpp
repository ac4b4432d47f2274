#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "impact/core_types.hpp"

namespace impact::stats {

struct PointwiseErrors {
  double mae = 0;
  double rmse = 0;
};

PointwiseErrors pointwise_errors(const Series& pred, const Series& ref);

/// Peak = max |s(t)|.
double peak_abs(const Series& s);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
/// Pearson on average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& x);

struct PeakMetrics {
  std::vector<double> pae;  ///< per impact |peak_pred - peak_ref|
  double mean_pae = 0;
  double peak_rmse = 0;
  /// Undefined (nullopt) when the reference peaks have zero variance.
  std::optional<double> peak_r2;
  std::optional<double> pearson;
  std::optional<double> spearman;
};

/// Peak-level agreement over impacts, one peak value per impact. Needs >= 3.
PeakMetrics peak_metrics(const std::vector<double>& pred_peaks,
                         const std::vector<double>& ref_peaks);

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// 10 log10(sum x^2 / sum (x_hat - x)^2); +inf for an exact match.
double snr_db(const Series& ref, const Series& candidate);

struct BlandAltman {
  std::vector<double> mean;  ///< (pred + ref) / 2
  std::vector<double> diff;  ///< pred - ref
  double mean_diff = 0;
  double sd = 0;  ///< sample standard deviation (n - 1)
  double lower = 0;
  double upper = 0;
};

BlandAltman bland_altman(const Series& pred, const Series& ref);

enum class Alternative { TwoSided, Less, Greater };
enum class WilcoxonMethod { Auto, Exact, NormalApprox };

std::string_view alternative_name(Alternative a);

struct WilcoxonResult {
  double w_statistic = 0;  ///< min(W+, W-)
  double w_plus = 0;
  double w_minus = 0;
  int n_effective = 0;
  double p_value = 1;
  WilcoxonMethod method = WilcoxonMethod::Exact;
  Alternative alternative = Alternative::TwoSided;
};

inline constexpr int kWilcoxonMinN = 5;
inline constexpr int kWilcoxonMaxExactN = 20;

/// Paired signed-rank test on d = a - b. Zero differences are dropped and tied
/// |d| receive average ranks. Auto uses the exact null distribution for
/// n <= 20 and the tie- and continuity-corrected normal approximation beyond.
/// "Less" tests whether a tends to be smaller than b.
/// Throws std::invalid_argument when fewer than 5 non-zero differences remain.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative = Alternative::TwoSided,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

/// Per-component summary over a set of impacts (6 axes + 2 magnitudes).
struct ComponentErrors {
  ComponentId component;
  double mae = 0;   ///< mean over impacts
  double rmse = 0;  ///< mean over impacts
  std::vector<double> mae_per_impact;
  std::vector<double> rmse_per_impact;
  PeakMetrics peaks;
  double snr_db = 0;  ///< mean over impacts whose reference is not all zero
  std::vector<double> snr_per_impact;  ///< NaN where the reference is all zero
};

/// Compares candidate traces against references impact by impact.
std::vector<ComponentErrors> error_report(const std::vector<KinematicsTrace>& candidates,
                                          const std::vector<KinematicsTrace>& references);

}  // namespace impact::stats
