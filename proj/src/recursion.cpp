#include "rwrt/recursion.hpp"

#include "rwrt/limits.hpp"
#include "rwrt/stats.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace rwrt {

char symbol_char(Symbol s) {
  switch (s) {
    case Symbol::plus:
      return '+';
    case Symbol::minus:
      return '-';
    case Symbol::star:
      return '*';
    case Symbol::times:
      return 'x';
  }
  return '?';
}

Symbol symbol_from_string(std::string_view t) {
  if (t == "+" || t == "plus") return Symbol::plus;
  if (t == "-" || t == "minus") return Symbol::minus;
  if (t == "*" || t == "star") return Symbol::star;
  if (t == "x" || t == "X" || t == "times") return Symbol::times;
  throw ParameterError("recursion", "unknown symbol '" + std::string(t) + "'");
}

bool uses_local_time(Symbol s) { return s == Symbol::plus || s == Symbol::star; }
bool uses_product_measure(Symbol s) { return s == Symbol::star || s == Symbol::times; }

RecursionWord RecursionWord::parse(std::string_view text) {
  RecursionWord w;
  std::string token;
  const auto flush = [&] {
    if (!token.empty()) w.symbols.push_back(symbol_from_string(token));
    token.clear();
  };
  for (const char c : text) {
    if (c == ',' || c == ' ') {
      flush();
    } else if (c == '+' || c == '-' || c == '*' || ((c == 'x' || c == 'X') && token.empty())) {
      flush();
      token = c;
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return w;
}

std::string RecursionWord::str() const {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ',';
    out += symbol_char(symbols[i]);
  }
  return out;
}

double phi(Symbol s, double x, double alpha) {
  if (!(x > 0.0 && x < 1.0)) throw ParameterError("recursion", "Hurst argument must lie in (0, 1)");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("recursion", "alpha must lie in (1, 2]");
  return uses_local_time(s) ? 1.0 - x + x / alpha : x / alpha;
}

double compose_hurst(const RecursionWord& word, double h0, double alpha) {
  double h = h0;
  if (word.symbols.empty() && !(h0 > 0.0 && h0 < 1.0)) throw ParameterError("recursion", "h0 must lie in (0, 1)");
  for (const Symbol s : word.symbols) h = phi(s, h, alpha);
  return h;
}

// ---------------------------------------------------------------------------

RecursionState RecursionState::fbm(double alpha, double hurst, const TimeGrid& grid) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("recursion", "alpha must lie in (1, 2]");
  grid.validate();
  auto gen = std::make_shared<FgnGenerator>(hurst, grid.steps);
  RecursionState s;
  s.alpha = alpha;
  s.hurst = hurst;
  s.grid = grid;
  s.generator = [gen, grid](RandomStream& stream) {
    const Vector noise = gen->sample(stream);
    Vector v(grid.points());
    v[0] = 0.0;
    const double scale = std::pow(grid.dt, gen->hurst());
    double acc = 0.0;
    for (Index k = 0; k < grid.steps; ++k) {
      acc += noise[k];
      v[k + 1] = scale * acc;
    }
    return v;
  };
  return s;
}

Matrix RecursionState::ensemble(Index replicates, const RandomStream& stream) const {
  Matrix out(replicates, grid.points());
  for (Index r = 0; r < replicates; ++r) {
    RandomStream s = stream.child("replicate", static_cast<std::uint64_t>(r));
    out.row(r) = sample(s).transpose();
  }
  return out;
}

RecursionState recurse_step(const RecursionState& state, Symbol symbol, Index copies, double cell_width) {
  if (!state.generator) throw ParameterError("recursion", "state has no generator");
  if (copies < 1) throw ParameterError("recursion", "M must be positive");
  if (!(cell_width > 0.0)) throw ParameterError("recursion", "cell width must be positive");
  RecursionState next;
  next.alpha = state.alpha;
  next.hurst = phi(symbol, state.hurst, state.alpha);
  next.word = state.word;
  next.word.symbols.push_back(symbol);
  next.grid = state.grid;

  const Index n = uses_product_measure(symbol) ? copies : 1;
  const Flavor flavor = uses_product_measure(symbol) ? Flavor::gamma : Flavor::delta;
  const KernelKind kernel = uses_local_time(symbol) ? KernelKind::localtime : KernelKind::indicator;
  const double alpha = state.alpha;
  const auto prev = std::make_shared<const RecursionState>(state);
  next.generator = [prev, n, flavor, kernel, alpha, cell_width](RandomStream& stream) {
    std::vector<RealPath> paths;
    paths.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      RandomStream s = stream.child("copy", static_cast<std::uint64_t>(i));
      paths.emplace_back(prev->grid.dt, prev->sample(s));
    }
    return integrate_kernels(paths, flavor, kernel, alpha, cell_width, 1, stream);
  };
  return next;
}

// ---------------------------------------------------------------------------

namespace {

double kde_max(const Vector& x, double bandwidth) {
  const double lo = x.minCoeff() - 3.0 * bandwidth;
  const double hi = x.maxCoeff() + 3.0 * bandwidth;
  constexpr int kPoints = 512;
  const double norm = 1.0 / (static_cast<double>(x.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double best = 0.0;
  for (int i = 0; i <= kPoints; ++i) {
    const double at = lo + (hi - lo) * i / kPoints;
    const double d = ((x.array() - at) / bandwidth).square().unaryExpr([](double u) { return std::exp(-0.5 * u); }).sum();
    best = std::max(best, d * norm);
  }
  return best;
}

bool stable_means(const MeanEstimate& a, const MeanEstimate& b) {
  return std::abs(a.mean - b.mean) <= 3.0 * std::max(std::hypot(a.stderr_, b.stderr_), 1e-12 * std::abs(b.mean));
}

}  // namespace

PpReport check_pp_conditions(const RecursionState& state, Index replicates, const RandomStream& stream) {
  if (replicates < 50) throw ParameterError("recursion", "need at least 50 replicates");
  const Matrix paths = state.ensemble(2 * replicates, stream);
  const Index last = state.grid.steps;
  PpReport rep;

  const Vector abs1 = paths.col(last).cwiseAbs();
  const auto a_half = mean_with_stderr(abs1.head(replicates));
  const auto a_full = mean_with_stderr(abs1);
  rep.a = {"E|Y_1|", a_full.mean, a_half.mean, a_full.mean > 1e-12 && stable_means(a_half, a_full)};

  Vector coarse(2 * replicates);
  Vector fine(2 * replicates);
  for (Index r = 0; r < 2 * replicates; ++r) {
    const RealPath p(state.grid.dt, paths.row(r).transpose());
    const double range = p.values.maxCoeff() - p.values.minCoeff();
    const double w = range > 0.0 ? range / 128.0 : 1.0;
    coarse[r] = local_time(p, w).l2();
    fine[r] = local_time(p, w / 2.0).l2();
  }
  const double b_fine = fine.mean();
  const double b_coarse = coarse.mean();
  rep.b = {"E int l(1,x)^2 dx", b_fine, b_coarse,
           std::isfinite(b_fine) && b_fine > 0.0 && std::abs(b_fine - b_coarse) <= 0.1 * b_fine};

  const Vector y1 = paths.col(last);
  const double sd = std::sqrt((y1.array() - y1.mean()).square().sum() / static_cast<double>(y1.size() - 1));
  if (sd > 0.0) {
    const double bw = 1.06 * sd * std::pow(static_cast<double>(y1.size()), -0.2);
    const double m1 = kde_max(y1, bw);
    const double m2 = kde_max(y1, bw / 2.0);
    rep.c = {"max density (KDE)", m2, m1, std::isfinite(m2) && m2 / m1 > 0.8 && m2 / m1 < 1.25};
  } else {
    rep.c = {"max density (KDE)", std::numeric_limits<double>::infinity(), 0.0, false};
  }

  const Vector sup = paths.cwiseAbs().rowwise().maxCoeff();
  const auto d_half = mean_with_stderr(sup.head(replicates));
  const auto d_full = mean_with_stderr(sup);
  rep.d = {"E sup|Y_t|", d_full.mean, d_half.mean, std::isfinite(d_full.mean) && stable_means(d_half, d_full)};
  return rep;
}

}  // namespace rwrt
