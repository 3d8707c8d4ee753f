#include "rcfe/measures.hpp"

#include <cmath>
#include <limits>

#include "rcfe/logsum.hpp"

namespace rcfe {

double shannon_entropy(const Eigen::Ref<const Vector>& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

double kl_divergence(const Eigen::Ref<const Vector>& p,
                     const Eigen::Ref<const Vector>& q) {
  double d = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      d += p[i] * std::log(p[i] / q[i]);
    }
  }
  return d;
}

Nats entropy(const Eigen::Ref<const Vector>& p) {
  return Nats(shannon_entropy(p));
}

Nats cond_entropy(const JointDistribution& q) {
  const Vector& px = q.input_dist();
  double h = 0.0;
  for (Index x = 0; x < q.cond().rows(); ++x) {
    h += px[x] * shannon_entropy(q.cond().row(x));
  }
  return Nats(h);
}

Nats mutual_info(const JointDistribution& q) {
  const Vector m = q.output_marginal();
  return Nats(shannon_entropy(m) - cond_entropy(q).value());
}

Nats cond_kl(const JointDistribution& q, const Channel& ch) {
  const Vector& px = q.input_dist();
  double d = 0.0;
  for (Index x = 0; x < q.cond().rows(); ++x) {
    const double row = kl_divergence(q.cond().row(x), ch.transition().row(x));
    if (!std::isfinite(row)) return Nats::pos_inf();
    d += px[x] * row;
  }
  return Nats(d);
}

Nats ell(const JointDistribution& q, const Channel& ch) {
  const Nats d = cond_kl(q, ch);
  if (d.is_pos_inf()) return Nats::pos_inf();
  return Nats(cond_entropy(q).value() + d.value());
}

Nats f_functional(const JointDistribution& q, const Channel& ch, double beta) {
  const Nats l = ell(q, ch);
  if (l.is_pos_inf()) return Nats::neg_inf();
  return Nats(cond_entropy(q).value() - beta * l.value());
}

Nats psi_iid(const Channel& ch, double beta) {
  const Vector py = output_marginal(ch);
  Vector terms(py.size());
  Index k = 0;
  for (Index y = 0; y < py.size(); ++y) {
    if (py[y] > 0.0) terms[k++] = beta * std::log(py[y]);
  }
  return Nats(log_sum_exp(terms.head(k)));
}

}  // namespace rcfe
