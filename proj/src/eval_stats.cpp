#include "impact/eval_stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace impact::stats {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

PointwiseErrors pointwise_errors(const Series& pred, const Series& ref) {
  require_same_length(pred.size(), ref.size(), "pointwise_errors");
  if (pred.empty()) throw std::invalid_argument("pointwise_errors: empty series");
  double abs_sum = 0, sq_sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const auto n = static_cast<double>(pred.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

double peak_abs(const Series& s) {
  double m = 0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require_same_length(x.size(), y.size(), "pearson");
  if (x.size() < 2) throw std::invalid_argument("pearson: needs at least 2 points");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&x](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

PeakMetrics peak_metrics(const std::vector<double>& pred, const std::vector<double>& ref) {
  require_same_length(pred.size(), ref.size(), "peak_metrics");
  if (pred.size() < 3) throw std::invalid_argument("peak_metrics: needs at least 3 impacts");
  PeakMetrics m;
  double sq = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    m.pae.push_back(std::abs(d));
    sq += d * d;
  }
  m.mean_pae = mean_of(m.pae);
  m.peak_rmse = std::sqrt(sq / static_cast<double>(pred.size()));

  const double ref_mean = mean_of(ref);
  double ss_tot = 0;
  for (double r : ref) ss_tot += (r - ref_mean) * (r - ref_mean);
  if (ss_tot > 0.0) {
    m.peak_r2 = 1.0 - sq / ss_tot;
    const double p = pearson(pred, ref);
    if (!std::isnan(p)) m.pearson = p;
    const double s = spearman(pred, ref);
    if (!std::isnan(s)) m.spearman = s;
  }
  return m;
}

double snr_db(const Series& ref, const Series& candidate) {
  require_same_length(ref.size(), candidate.size(), "snr_db");
  double signal = 0, noise = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    signal += ref[i] * ref[i];
    const double e = candidate[i] - ref[i];
    noise += e * e;
  }
  if (signal == 0.0) throw std::invalid_argument("snr_db: reference is all zero");
  if (noise == 0.0) return kInfiniteSnr;
  return 10.0 * std::log10(signal / noise);
}

BlandAltman bland_altman(const Series& pred, const Series& ref) {
  require_same_length(pred.size(), ref.size(), "bland_altman");
  BlandAltman ba;
  ba.mean.reserve(pred.size());
  ba.diff.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ba.mean.push_back(0.5 * (pred[i] + ref[i]));
    ba.diff.push_back(pred[i] - ref[i]);
  }
  if (pred.empty()) return ba;
  ba.mean_diff = mean_of(ba.diff);
  if (pred.size() > 1) {
    double ss = 0;
    for (double d : ba.diff) ss += (d - ba.mean_diff) * (d - ba.mean_diff);
    ba.sd = std::sqrt(ss / static_cast<double>(pred.size() - 1));
  }
  ba.lower = ba.mean_diff - 1.96 * ba.sd;
  ba.upper = ba.mean_diff + 1.96 * ba.sd;
  return ba;
}

std::string_view alternative_name(Alternative a) {
  switch (a) {
    case Alternative::TwoSided:
      return "two_sided";
    case Alternative::Less:
      return "less";
    case Alternative::Greater:
      return "greater";
  }
  return "two_sided";
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    Alternative alternative, WilcoxonMethod method) {
  require_same_length(a.size(), b.size(), "wilcoxon_signed_rank");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  const int n = static_cast<int>(d.size());
  if (n < kWilcoxonMinN) {
    throw std::invalid_argument(fmt::format(
        "wilcoxon_signed_rank: {} non-zero differences, at least {} required", n, kWilcoxonMinN));
  }

  std::vector<double> abs_d(d.size());
  std::transform(d.begin(), d.end(), abs_d.begin(), [](double v) { return std::abs(v); });
  const std::vector<double> ranks = average_ranks(abs_d);

  WilcoxonResult res;
  res.n_effective = n;
  res.alternative = alternative;
  for (int i = 0; i < n; ++i) (d[static_cast<std::size_t>(i)] > 0 ? res.w_plus : res.w_minus) += ranks[static_cast<std::size_t>(i)];
  res.w_statistic = std::min(res.w_plus, res.w_minus);

  if (method == WilcoxonMethod::Auto) {
    method = n <= kWilcoxonMaxExactN ? WilcoxonMethod::Exact : WilcoxonMethod::NormalApprox;
  }
  if (method == WilcoxonMethod::Exact && n > kWilcoxonMaxExactN) {
    throw std::invalid_argument("wilcoxon_signed_rank: exact method limited to n <= 20");
  }
  res.method = method;

  if (method == WilcoxonMethod::Exact) {
    // Null distribution of W+ over the 2^n equally likely sign patterns.
    // Ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<long> twice(ranks.size());
    std::transform(ranks.begin(), ranks.end(), twice.begin(),
                   [](double r) { return std::lround(2.0 * r); });
    const long total = std::accumulate(twice.begin(), twice.end(), 0L);
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (long r : twice) {
      reach += r;
      for (long s = reach; s >= r; --s) count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
    }
    const double patterns = std::ldexp(1.0, n);
    const auto cdf = [&](long upto) {
      double c = 0;
      for (long s = 0; s <= std::min(upto, total); ++s) c += count[static_cast<std::size_t>(s)];
      return c / patterns;
    };
    const long w_plus2 = std::lround(2.0 * res.w_plus);
    switch (alternative) {
      case Alternative::TwoSided:
        res.p_value = std::min(1.0, 2.0 * cdf(std::lround(2.0 * res.w_statistic)));
        break;
      case Alternative::Less:
        res.p_value = cdf(w_plus2);
        break;
      case Alternative::Greater:
        res.p_value = 1.0 - cdf(w_plus2 - 1);
        break;
    }
    return res;
  }

  const double nd = n;
  const double mean = nd * (nd + 1) / 4.0;
  double tie_term = 0;
  {
    std::vector<double> sorted = abs_d;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double sd = std::sqrt(nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie_term / 48.0);
  switch (alternative) {
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(res.w_plus - mean) - 0.5) / sd;
      res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
      break;
    }
    case Alternative::Less:
      res.p_value = normal_cdf((res.w_plus - mean + 0.5) / sd);
      break;
    case Alternative::Greater:
      res.p_value = 1.0 - normal_cdf((res.w_plus - mean - 0.5) / sd);
      break;
  }
  return res;
}

std::vector<ComponentErrors> error_report(const std::vector<KinematicsTrace>& candidates,
                                          const std::vector<KinematicsTrace>& references) {
  require_same_length(candidates.size(), references.size(), "error_report");
  if (candidates.empty()) throw std::invalid_argument("error_report: no impacts");

  std::vector<ComponentErrors> out;
  for (ComponentId c : kEvaluationComponents) {
    ComponentErrors ce;
    ce.component = c;
    std::vector<double> pred_peaks, ref_peaks;
    double snr_sum = 0;
    std::size_t snr_count = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Series p = component_series(candidates[i], c);
      const Series r = component_series(references[i], c);
      const PointwiseErrors e = pointwise_errors(p, r);
      ce.mae_per_impact.push_back(e.mae);
      ce.rmse_per_impact.push_back(e.rmse);
      pred_peaks.push_back(peak_abs(p));
      ref_peaks.push_back(peak_abs(r));
      if (peak_abs(r) > 0.0) {
        const double s = snr_db(r, p);
        ce.snr_per_impact.push_back(s);
        snr_sum += s;
        ++snr_count;
      } else {
        ce.snr_per_impact.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    ce.mae = mean_of(ce.mae_per_impact);
    ce.rmse = mean_of(ce.rmse_per_impact);
    ce.snr_db = snr_count > 0 ? snr_sum / static_cast<double>(snr_count)
                              : std::numeric_limits<double>::quiet_NaN();
    if (candidates.size() >= 3) ce.peaks = peak_metrics(pred_peaks, ref_peaks);
    out.push_back(std::move(ce));
  }
  return out;
}

}  // namespace impact::stats
