#ifndef RCFE_CHANNEL_HPP
#define RCFE_CHANNEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rcfe/types.hpp"

namespace rcfe {

/// A finite discrete memoryless channel together with its fixed input
/// distribution. Row x of the transition matrix is W(.|x); every row and the
/// input distribution must be probability vectors within kProbTolLoad, and
/// zero-mass input letters are rejected at construction.
class Channel {
 public:
  static Channel make(Matrix transition, Vector input_dist,
                      std::vector<std::string> input_labels = {},
                      std::vector<std::string> output_labels = {});

  Index input_size() const { return transition_.rows(); }
  Index output_size() const { return transition_.cols(); }

  const Matrix& transition() const { return transition_; }
  const Vector& input_dist() const { return input_dist_; }

  // Entry-wise log W, with -inf where W(y|x) = 0.
  const Matrix& log_transition() const { return log_transition_; }

  bool supported(Index x, Index y) const { return transition_(x, y) > 0.0; }
  // Output letters with W(y|x) > 0, per input letter.
  const std::vector<std::vector<Index>>& row_support() const {
    return row_support_;
  }

  const std::vector<std::string>& input_labels() const { return input_labels_; }
  const std::vector<std::string>& output_labels() const {
    return output_labels_;
  }

  // FNV-1a over a canonical text rendering; identifies the channel in
  // metadata sidecars.
  std::uint64_t hash() const;

 private:
  Channel() = default;
  Matrix transition_;
  Matrix log_transition_;
  Vector input_dist_;
  std::vector<std::vector<Index>> row_support_;
  std::vector<std::string> input_labels_;
  std::vector<std::string> output_labels_;
};

/// A joint law on X x Y with X-marginal pinned to the channel input
/// distribution, stored as conditional rows Q_{Y|X}. Rows must sum to one
/// within kProbTolDerived. Mass placed where W(y|x) = 0 is representable but
/// infeasible: divergence-based measures return infinity flags for it.
class JointDistribution {
 public:
  static JointDistribution make(const Channel& ch, Matrix cond_rows);

  const Matrix& cond() const { return cond_; }
  const Vector& input_dist() const { return channel_->input_dist(); }
  const Channel& channel() const { return *channel_; }

  // Q_Y(y) = sum_x P_X(x) Q(y|x).
  Vector output_marginal() const {
    return cond_.transpose() * channel_->input_dist();
  }

  bool respects_support() const;

 private:
  JointDistribution(const Channel& ch, Matrix cond)
      : channel_(&ch), cond_(std::move(cond)) {}
  const Channel* channel_;
  Matrix cond_;
};

// P_Y(y) = sum_x P_X(x) W(y|x).
Vector output_marginal(const Channel& ch);

}  // namespace rcfe

#endif  // RCFE_CHANNEL_HPP
