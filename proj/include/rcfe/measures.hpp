#ifndef RCFE_MEASURES_HPP
#define RCFE_MEASURES_HPP

#include "rcfe/channel.hpp"
#include "rcfe/types.hpp"

namespace rcfe {

// Raw scalar kernels, 0*log(0) := 0 throughout. These are the hot-path
// pieces; the Nats-returning operations below wrap them.

// -sum p log p.
double shannon_entropy(const Eigen::Ref<const Vector>& p);

// sum p log(p/q); +inf when p puts mass where q vanishes.
double kl_divergence(const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& q);

// Information measures of a joint law Q_XY = P_X x Q_{Y|X}.

Nats entropy(const Eigen::Ref<const Vector>& p);

// H_Q(Y|X) = sum_x P_X(x) H(Q(.|x)).
Nats cond_entropy(const JointDistribution& q);

// I_Q(X;Y) = H(Q_Y) - H_Q(Y|X).
Nats mutual_info(const JointDistribution& q);

// D(Q_{Y|X} || W | P_X); +inf flag when Q violates the support of W.
Nats cond_kl(const JointDistribution& q, const Channel& ch);

// l(Q_XY) = H_Q(Y|X) + D(Q_{Y|X}||W|P_X), the per-letter exponent of the
// channel likelihood; equals -sum_{x,y} P_X(x)Q(y|x) log W(y|x).
Nats ell(const JointDistribution& q, const Channel& ch);

// F(Q_XY) = H_Q(Y|X) - beta * l(Q_XY); -inf flag off support.
Nats f_functional(const JointDistribution& q, const Channel& ch, double beta);

// log sum_y P_Y(y)^beta for the channel-induced output marginal.
Nats psi_iid(const Channel& ch, double beta);

}  // namespace rcfe

#endif  // RCFE_MEASURES_HPP
