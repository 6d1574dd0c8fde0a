#include "ccl/infer.hpp"

#include <algorithm>

#include "ccl/errors.hpp"
#include "ccl/parallel.hpp"

namespace ccl {

std::vector<std::int64_t> window_starts(std::int64_t n, int window_len) {
  if (window_len < 1) throw SpecInvalid("window_len must be >= 1");
  if (n <= window_len) return {0};
  const std::int64_t stride = std::max<std::int64_t>(1, window_len / 2);
  std::vector<std::int64_t> starts;
  for (std::int64_t s = 0; s + window_len <= n; s += stride)
    starts.push_back(s);
  if (starts.back() + window_len < n) starts.push_back(n - window_len);
  return starts;
}

namespace {

// Center a short trace inside one window, replicating the edge samples.
Eigen::VectorXd padded_window(const Eigen::Ref<const Eigen::VectorXd>& x,
                              int window_len, Eigen::Index& left) {
  const Eigen::Index n = x.size();
  left = (window_len - n) / 2;
  Eigen::VectorXd w(window_len);
  for (Eigen::Index i = 0; i < window_len; ++i) {
    const Eigen::Index src = std::clamp<Eigen::Index>(i - left, 0, n - 1);
    w[i] = x[src];
  }
  return w;
}

ProbabilityMap average_rows(
    Eigen::Index n, int window_len, const std::vector<std::int64_t>& starts,
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>& rows) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(n);
  for (std::size_t wi = 0; wi < starts.size(); ++wi) {
    acc.segment(starts[wi], window_len) += rows.row(wi).transpose();
    cnt.segment(starts[wi], window_len).array() += 1.0;
  }
  ProbabilityMap map;
  map.window_len = window_len;
  map.values = acc.cwiseQuotient(cnt);
  return map;
}

}  // namespace

ProbabilityMap sliding_infer_with(
    const WindowClassifier& classify,
    const Eigen::Ref<const Eigen::VectorXd>& samples, int window_len) {
  const Eigen::Index n = samples.size();
  if (n < 1) throw SpecInvalid("empty trace");
  if (n < window_len) {
    Eigen::Index left = 0;
    const Eigen::VectorXd w = padded_window(samples, window_len, left);
    Eigen::VectorXd probs = classify(w);
    if (probs.size() != window_len)
      throw ShapeMismatch("classifier output size mismatch");
    ProbabilityMap map;
    map.window_len = window_len;
    map.values = probs.segment(left, n);
    return map;
  }
  const auto starts = window_starts(n, window_len);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      starts.size(), window_len);
  for (std::size_t wi = 0; wi < starts.size(); ++wi) {
    Eigen::VectorXd probs = classify(samples.segment(starts[wi], window_len));
    if (probs.size() != window_len)
      throw ShapeMismatch("classifier output size mismatch");
    rows.row(wi) = probs.transpose();
  }
  return average_rows(n, window_len, starts, rows);
}

ProbabilityMap sliding_infer(const ModelParams<float>& params,
                             const Eigen::Ref<const Eigen::VectorXd>& samples,
                             int batch_size, int workers) {
  const int window_len = static_cast<int>(params.desc.input_len);
  const Eigen::Index n = samples.size();
  if (n < 1) throw SpecInvalid("empty trace");
  if (batch_size < 1) throw SpecInvalid("batch_size must be >= 1");

  Eigen::Index pad_left = 0;
  std::vector<std::int64_t> starts;
  Eigen::VectorXd padded;
  if (n < window_len) {
    padded = padded_window(samples, window_len, pad_left);
    starts = {0};
  } else {
    starts = window_starts(n, window_len);
  }

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      starts.size(), window_len);
  const std::size_t n_batches =
      (starts.size() + batch_size - 1) / static_cast<std::size_t>(batch_size);
  parallel_for(n_batches, workers, [&](std::size_t bi) {
    const std::size_t base = bi * static_cast<std::size_t>(batch_size);
    const auto b_n = std::min<std::size_t>(batch_size, starts.size() - base);
    Tensor<float> x =
        Tensor<float>::zeros3(static_cast<Eigen::Index>(b_n), 1, window_len);
    for (std::size_t b = 0; b < b_n; ++b) {
      const std::int64_t s = starts[base + b];
      for (int i = 0; i < window_len; ++i)
        x(static_cast<Eigen::Index>(b), 0, i) =
            static_cast<float>(n < window_len ? padded[i] : samples[s + i]);
    }
    Tensor<float> probs = sigmoid(forward_eval(params, x));
    for (std::size_t b = 0; b < b_n; ++b)
      for (int i = 0; i < window_len; ++i)
        rows(static_cast<Eigen::Index>(base + b), i) =
            static_cast<double>(probs(static_cast<Eigen::Index>(b), i));
  });

  if (n < window_len) {
    ProbabilityMap map;
    map.window_len = window_len;
    map.values = rows.row(0).segment(pad_left, n).transpose();
    return map;
  }
  return average_rows(n, window_len, starts, rows);
}

DetectionResult postprocess(const ProbabilityMap& map, double threshold,
                            int min_width) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw SpecInvalid("threshold must lie in (0, 1)");
  if (min_width < 1) throw SpecInvalid("min_width must be >= 1");
  DetectionResult out;
  out.threshold = threshold;
  out.min_width = min_width;
  const Eigen::Index n = map.values.size();
  Eigen::Index run_start = -1;
  for (Eigen::Index i = 0; i <= n; ++i) {
    const bool hot = i < n && map.values[i] > threshold;
    if (hot && run_start < 0) run_start = i;
    if (!hot && run_start >= 0) {
      const Eigen::Index run_end = i - 1;  // inclusive
      if (run_end - run_start + 1 >= min_width) {
        Region r;
        r.start = run_start;
        r.end = run_end;
        r.center = (run_start + run_end) / 2;
        out.regions.push_back(r);
        out.collars.push_back(r.center);
      }
      run_start = -1;
    }
  }
  return out;
}

MatchReport match_collars(const std::vector<std::int64_t>& predicted,
                          const std::vector<std::int64_t>& truth,
                          std::int64_t tolerance) {
  if (tolerance < 0) throw SpecInvalid("tolerance must be >= 0");
  auto check_sorted = [](const std::vector<std::int64_t>& v, const char* who) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1])
        throw UnsortedInput(std::string(who) +
                            " positions must be strictly increasing");
  };
  check_sorted(predicted, "predicted");
  check_sorted(truth, "truth");

  std::vector<char> used(truth.size(), 0);
  std::int64_t tp = 0;
  for (const std::int64_t p : predicted) {
    const auto lb = std::lower_bound(truth.begin(), truth.end(), p);
    std::ptrdiff_t right = -1, left = -1;
    for (auto j = lb - truth.begin();
         j < static_cast<std::ptrdiff_t>(truth.size()) &&
         truth[static_cast<std::size_t>(j)] - p <= tolerance;
         ++j)
      if (!used[static_cast<std::size_t>(j)]) {
        right = j;
        break;
      }
    for (auto j = lb - truth.begin() - 1;
         j >= 0 && p - truth[static_cast<std::size_t>(j)] <= tolerance; --j)
      if (!used[static_cast<std::size_t>(j)]) {
        left = j;
        break;
      }
    std::ptrdiff_t pick = -1;
    if (left >= 0 && right >= 0)
      // ties go to the earlier (left) mark
      pick = (p - truth[static_cast<std::size_t>(left)] <=
              truth[static_cast<std::size_t>(right)] - p)
                 ? left
                 : right;
    else if (left >= 0)
      pick = left;
    else if (right >= 0)
      pick = right;
    if (pick >= 0) {
      used[static_cast<std::size_t>(pick)] = 1;
      ++tp;
    }
  }

  MatchReport r;
  r.tolerance = tolerance;
  r.tp = tp;
  r.fp = static_cast<std::int64_t>(predicted.size()) - tp;
  r.fn = static_cast<std::int64_t>(truth.size()) - tp;
  r.precision = predicted.empty() ? 0.0 : double(tp) / double(predicted.size());
  r.recall = truth.empty() ? 0.0 : double(tp) / double(truth.size());
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

}  // namespace ccl
