#ifndef RCFE_TESTS_FIXTURES_HPP
#define RCFE_TESTS_FIXTURES_HPP

#include "rcfe/channel.hpp"

namespace rcfe::testing {

// The worked example channel: W(0|0)=1, W(1|0)=0, W(0|1)=0.45, W(1|1)=0.55,
// equiprobable inputs. Mutual information 0.244099 nats.
inline Channel z_channel() {
  Matrix w(2, 2);
  w << 1.0, 0.0, 0.45, 0.55;
  Vector px(2);
  px << 0.5, 0.5;
  return Channel::make(std::move(w), std::move(px));
}

// Binary symmetric channel with uniform input; output marginal is uniform.
inline Channel bsc(double crossover = 0.11) {
  Matrix w(2, 2);
  w << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
  Vector px(2);
  px << 0.5, 0.5;
  return Channel::make(std::move(w), std::move(px));
}

inline Channel identity2() {
  Matrix w(2, 2);
  w << 1.0, 0.0, 0.0, 1.0;
  Vector px(2);
  px << 0.5, 0.5;
  return Channel::make(std::move(w), std::move(px));
}

// Three-input channel with a skewed prior, for less symmetric coverage.
inline Channel ternary() {
  Matrix w(3, 3);
  w << 0.7, 0.2, 0.1,
       0.1, 0.6, 0.3,
       0.25, 0.25, 0.5;
  Vector px(3);
  px << 0.5, 0.3, 0.2;
  return Channel::make(std::move(w), std::move(px));
}

}  // namespace rcfe::testing

#endif  // RCFE_TESTS_FIXTURES_HPP
