#include "rcfe/channel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace rcfe {

namespace {

void check_prob_vector(const Eigen::Ref<const Vector>& p, double tol,
                       const char* what) {
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= -tol) || !std::isfinite(p[i])) {
      throw ValidationError(std::string(what) + ": negative or non-finite entry");
    }
  }
  const double s = p.sum();
  if (std::abs(s - 1.0) > tol) {
    throw ValidationError(std::string(what) + ": entries sum to " +
                          std::to_string(s) + ", not 1");
  }
}

}  // namespace

Channel Channel::make(Matrix transition, Vector input_dist,
                      std::vector<std::string> input_labels,
                      std::vector<std::string> output_labels) {
  if (transition.rows() < 1 || transition.cols() < 1) {
    throw ValidationError("channel: empty alphabet");
  }
  if (input_dist.size() != transition.rows()) {
    throw ValidationError("channel: P_X length does not match row count");
  }
  for (Index x = 0; x < transition.rows(); ++x) {
    check_prob_vector(transition.row(x), kProbTolLoad, "channel: W row");
  }
  check_prob_vector(input_dist, kProbTolLoad, "channel: P_X");
  for (Index x = 0; x < input_dist.size(); ++x) {
    if (input_dist[x] <= 0.0) {
      throw ValidationError(
          "channel: P_X has a zero-mass input letter; remove it from the channel file");
    }
  }
  if (!input_labels.empty() &&
      static_cast<Index>(input_labels.size()) != transition.rows()) {
    throw ValidationError("channel: input label count mismatch");
  }
  if (!output_labels.empty() &&
      static_cast<Index>(output_labels.size()) != transition.cols()) {
    throw ValidationError("channel: output label count mismatch");
  }

  Channel ch;
  ch.transition_ = std::move(transition);
  ch.input_dist_ = std::move(input_dist);
  ch.log_transition_ =
      ch.transition_.unaryExpr([](double w) {
        return w > 0.0 ? std::log(w)
                       : -std::numeric_limits<double>::infinity();
      });
  ch.row_support_.resize(static_cast<std::size_t>(ch.transition_.rows()));
  for (Index x = 0; x < ch.transition_.rows(); ++x) {
    for (Index y = 0; y < ch.transition_.cols(); ++y) {
      if (ch.transition_(x, y) > 0.0) {
        ch.row_support_[static_cast<std::size_t>(x)].push_back(y);
      }
    }
  }
  if (input_labels.empty()) {
    for (Index x = 0; x < ch.transition_.rows(); ++x) {
      input_labels.push_back(std::to_string(x));
    }
  }
  if (output_labels.empty()) {
    for (Index y = 0; y < ch.transition_.cols(); ++y) {
      output_labels.push_back(std::to_string(y));
    }
  }
  ch.input_labels_ = std::move(input_labels);
  ch.output_labels_ = std::move(output_labels);
  return ch;
}

std::uint64_t Channel::hash() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  auto mix = [&h](const char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 1099511628211ull;
    }
  };
  char buf[64];
  auto mix_double = [&](double v) {
    const int len = std::snprintf(buf, sizeof(buf), "%.17g|", v);
    mix(buf, static_cast<std::size_t>(len));
  };
  mix_double(static_cast<double>(input_size()));
  mix_double(static_cast<double>(output_size()));
  for (Index x = 0; x < input_size(); ++x) mix_double(input_dist_[x]);
  for (Index x = 0; x < input_size(); ++x) {
    for (Index y = 0; y < output_size(); ++y) mix_double(transition_(x, y));
  }
  return h;
}

JointDistribution JointDistribution::make(const Channel& ch, Matrix cond_rows) {
  if (cond_rows.rows() != ch.input_size() ||
      cond_rows.cols() != ch.output_size()) {
    throw ValidationError("joint distribution: shape does not match channel");
  }
  for (Index x = 0; x < cond_rows.rows(); ++x) {
    check_prob_vector(cond_rows.row(x), kProbTolDerived,
                      "joint distribution: conditional row");
  }
  return JointDistribution(ch, std::move(cond_rows));
}

bool JointDistribution::respects_support() const {
  for (Index x = 0; x < cond_.rows(); ++x) {
    for (Index y = 0; y < cond_.cols(); ++y) {
      if (cond_(x, y) > 0.0 && !channel_->supported(x, y)) return false;
    }
  }
  return true;
}

Vector output_marginal(const Channel& ch) {
  return ch.transition().transpose() * ch.input_dist();
}

}  // namespace rcfe
