#include "rcfe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rcfe/logsum.hpp"

namespace rcfe {

namespace {

double log_multinomial(long long total, const std::vector<long long>& parts) {
  double v = std::lgamma(static_cast<double>(total) + 1.0);
  for (const long long p : parts) {
    v -= std::lgamma(static_cast<double>(p) + 1.0);
  }
  return v;
}

}  // namespace

std::vector<Codeword> enumerate_type_class(
    const std::vector<int>& composition) {
  Codeword base;
  for (std::size_t letter = 0; letter < composition.size(); ++letter) {
    base.insert(base.end(), static_cast<std::size_t>(composition[letter]),
                static_cast<int>(letter));
  }
  std::vector<Codeword> sequences;
  std::sort(base.begin(), base.end());
  do {
    sequences.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return sequences;
}

double log_type_class_size(const std::vector<int>& composition) {
  long long n = 0;
  std::vector<long long> parts;
  for (const int c : composition) {
    n += c;
    parts.push_back(c);
  }
  return log_multinomial(n, parts);
}

AtomLaw atom_law(const Channel& ch, const std::vector<int>& composition,
                 const Codeword& y_ref) {
  const Index nx = ch.input_size();
  const Index ny = ch.output_size();
  std::vector<long long> y_type(static_cast<std::size_t>(ny), 0);
  for (const int y : y_ref) y_type[static_cast<std::size_t>(y)] += 1;

  const double log_t = log_type_class_size(composition);

  AtomLaw law;
  // Enumerate all contingency tables c(x, y) with row sums equal to the
  // composition and column sums equal to the type of y_ref; each table is
  // one conditional-type class.
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(nx, ny);
  std::vector<long long> row_left(composition.begin(), composition.end());
  std::vector<long long> col_left = y_type;

  std::function<void(Index)> recurse = [&](Index cell) {
    const Index x = cell / ny;
    const Index y = cell % ny;
    if (cell == nx * ny) {
      // Class size: choose, within each output-letter slot set, which
      // positions carry which input letter.
      double log_count = 0.0;
      for (Index yy = 0; yy < ny; ++yy) {
        std::vector<long long> parts;
        for (Index xx = 0; xx < nx; ++xx) parts.push_back(c(xx, yy));
        log_count +=
            log_multinomial(y_type[static_cast<std::size_t>(yy)], parts);
      }
      double log_value = 0.0;
      bool value_is_zero = false;
      for (Index xx = 0; xx < nx && !value_is_zero; ++xx) {
        for (Index yy = 0; yy < ny; ++yy) {
          if (c(xx, yy) == 0) continue;
          if (!ch.supported(xx, yy)) {
            value_is_zero = true;
            break;
          }
          log_value += c(xx, yy) * ch.log_transition()(xx, yy);
        }
      }
      law.values.push_back(value_is_zero ? 0.0 : std::exp(log_value));
      law.probs.push_back(std::exp(log_count - log_t));
      return;
    }
    // Last column of a row and last row of a column are forced.
    const long long max_here =
        std::min(row_left[static_cast<std::size_t>(x)],
                 col_left[static_cast<std::size_t>(y)]);
    const bool last_col = (y == ny - 1);
    const bool last_row = (x == nx - 1);
    long long lo = 0, hi = max_here;
    if (last_col) lo = hi = row_left[static_cast<std::size_t>(x)];
    if (last_row) lo = hi = col_left[static_cast<std::size_t>(y)];
    if (lo > max_here) return;  // inconsistent margins on this path
    for (long long v = lo; v <= hi; ++v) {
      c(x, y) = static_cast<int>(v);
      row_left[static_cast<std::size_t>(x)] -= v;
      col_left[static_cast<std::size_t>(y)] -= v;
      if (row_left[static_cast<std::size_t>(x)] >= 0 &&
          col_left[static_cast<std::size_t>(y)] >= 0) {
        recurse(cell + 1);
      }
      row_left[static_cast<std::size_t>(x)] += v;
      col_left[static_cast<std::size_t>(y)] += v;
      c(x, y) = 0;
    }
  };
  recurse(0);
  return law;
}

Nats exact_annealed_enum(const CodebookSpec& spec, double beta) {
  if (!(beta > 0.0)) {
    throw std::domain_error("exact_annealed_enum: beta must be > 0");
  }
  const std::vector<Codeword> type_class =
      enumerate_type_class(spec.composition);
  const double t_size = static_cast<double>(type_class.size());
  const double n_books =
      std::pow(t_size, static_cast<double>(spec.codeword_count));
  if (!(n_books <= kEnumCodebookCap)) {
    throw FeasibilityError(
        "exact_annealed_enum: |T|^M exceeds the enumeration cap 1e7");
  }
  const std::size_t m = static_cast<std::size_t>(spec.codeword_count);
  const std::size_t books = static_cast<std::size_t>(std::llround(n_books));

  CompensatedSum sum;
  Codebook book(m);
  for (std::size_t index = 0; index < books; ++index) {
    std::size_t rest = index;
    for (std::size_t slot = 0; slot < m; ++slot) {
      book[slot] = type_class[rest % type_class.size()];
      rest /= type_class.size();
    }
    sum.add(std::exp(partition_function(*spec.channel, book, beta).value()));
  }
  const double mean = sum.result() / static_cast<double>(books);
  return Nats(std::log(mean) / spec.block_length);
}

Nats exact_annealed_atoms(const CodebookSpec& spec, double beta) {
  if (!(beta > 0.0)) {
    throw std::domain_error("exact_annealed_atoms: beta must be > 0");
  }
  const Channel& ch = *spec.channel;
  const int n = spec.block_length;
  const Index ny = ch.output_size();
  std::int64_t total_outputs = 1;
  for (int i = 0; i < n; ++i) {
    if (total_outputs > kOutputEnumerationCap / ny) {
      throw FeasibilityError("exact_annealed_atoms: |Y|^n exceeds the cap");
    }
    total_outputs *= ny;
  }
  const long long m = spec.codeword_count;

  CompensatedSum total;
  Codeword y_ref(static_cast<std::size_t>(n), 0);
  for (std::int64_t out_index = 0; out_index < total_outputs; ++out_index) {
    std::int64_t rest = out_index;
    for (int i = 0; i < n; ++i) {
      y_ref[static_cast<std::size_t>(i)] = static_cast<int>(rest % ny);
      rest /= ny;
    }
    const AtomLaw law = atom_law(ch, spec.composition, y_ref);
    const std::size_t a = law.values.size();

    const double n_allocs =
        std::exp(log_multinomial(m + static_cast<long long>(a) - 1,
                                 {static_cast<long long>(a) - 1, m}));
    if (!(n_allocs <= kAtomAllocationCap)) {
      throw FeasibilityError(
          "exact_annealed_atoms: multinomial allocations exceed the cap 1e7");
    }

    // E[S^beta] over multinomial allocations of the M draws to atoms.
    CompensatedSum moment;
    std::vector<long long> alloc(a, 0);
    std::function<void(std::size_t, long long)> recurse =
        [&](std::size_t slot, long long left) {
          if (slot + 1 == a) {
            alloc[slot] = left;
            double log_weight = log_multinomial(m, alloc);
            double s_value = 0.0;
            for (std::size_t j = 0; j < a; ++j) {
              log_weight += alloc[j] * std::log(law.probs[j]);
              s_value += static_cast<double>(alloc[j]) * law.values[j];
            }
            if (s_value > 0.0) {
              moment.add(std::exp(log_weight + beta * std::log(s_value)));
            }
            return;
          }
          for (long long k = 0; k <= left; ++k) {
            alloc[slot] = k;
            recurse(slot + 1, left - k);
          }
        };
    if (a == 1) {
      alloc[0] = m;
      const double s_value = static_cast<double>(m) * law.values[0];
      if (s_value > 0.0) {
        moment.add(std::exp(beta * std::log(s_value)));
      }
    } else {
      recurse(0, m);
    }
    total.add(std::exp(-beta * std::log(static_cast<double>(m))) *
              moment.result());
  }
  return Nats(std::log(total.result()) / n);
}

double exact_binomial_moment(long long trials, double p, double beta) {
  if (trials < 1) {
    throw std::domain_error("exact_binomial_moment: trials must be >= 1");
  }
  if (trials > kBinomialTrialCap) {
    throw FeasibilityError(
        "exact_binomial_moment: trials exceed the direct-summation cap 1e6");
  }
  if (!(p > 0.0) || p > 1.0) {
    throw std::domain_error("exact_binomial_moment: p must be in (0, 1]");
  }
  if (!(beta > 0.0)) {
    throw std::domain_error("exact_binomial_moment: beta must be > 0");
  }
  if (p == 1.0) {
    return std::exp(beta * std::log(static_cast<double>(trials)));
  }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgt = std::lgamma(static_cast<double>(trials) + 1.0);
  const double mode = (static_cast<double>(trials) + 1.0) * p;

  CompensatedSum sum;
  double cumulative = 0.0;
  for (long long k = 1; k <= trials; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = lgt - std::lgamma(kd + 1.0) -
                           std::lgamma(static_cast<double>(trials - k) + 1.0) +
                           kd * lp + (static_cast<double>(trials) - kd) * lq;
    const double pmf = std::exp(log_pmf);
    cumulative += pmf;
    const double term = std::exp(log_pmf + beta * std::log(kd));
    sum.add(term);
    // Past the mode the pmf only decays; stop once the cumulative mass and
    // the running terms certify the tail is negligible.
    if (kd > mode && cumulative >= 1.0 - 1e-15 &&
        term <= sum.result() * 1e-18) {
      break;
    }
  }
  return sum.result();
}

}  // namespace rcfe
