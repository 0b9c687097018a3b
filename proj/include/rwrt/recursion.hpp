#pragma once

#include "rwrt/core.hpp"
#include "rwrt/random.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace rwrt {

enum class Symbol { plus, minus, star, times };

char symbol_char(Symbol s);
Symbol symbol_from_string(std::string_view token);
/// plus/star use local-time kernels, minus/times indicator kernels.
bool uses_local_time(Symbol s);
/// star/times integrate against the product measure M1.
bool uses_product_measure(Symbol s);

struct RecursionWord {
  std::vector<Symbol> symbols;

  /// "x,x,*" or "xx*"; tokens + - * x (or plus/minus/star/times).
  static RecursionWord parse(std::string_view text);
  std::string str() const;
  std::size_t size() const { return symbols.size(); }
};

/// phi_+(x) = 1 - x + x/alpha (plus, star); phi_-(x) = x/alpha (minus, times).
double phi(Symbol s, double x, double alpha);

/// phi_{v_n} o ... o phi_{v_1}(h0).
double compose_hurst(const RecursionWord& word, double h0, double alpha);

/// Current level of the construction: a sampler of i.i.d. paths on a fixed
/// grid of [0, T], plus the Hurst bookkeeping.
struct RecursionState {
  using Generator = std::function<Vector(RandomStream&)>;

  double alpha = 2.0;
  double hurst = 0.5;
  RecursionWord word;
  TimeGrid grid;
  Generator generator;

  /// Level zero: fBm-H' on the grid.
  static RecursionState fbm(double alpha, double hurst, const TimeGrid& grid);

  Vector sample(RandomStream& stream) const { return generator(stream); }
  /// rows = replicates; replicate r uses stream.child("replicate", r).
  Matrix ensemble(Index replicates, const RandomStream& stream) const;
};

/// Next level.  Each sample draws its own measure grid and, for star/times,
/// `copies` independent paths of the current level; plus/minus use a single
/// path.  Measure cells have width cell_width.
RecursionState recurse_step(const RecursionState& state, Symbol symbol, Index copies, double cell_width);

struct PpCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;  // same proxy at the doubled replicate count / resolution
  bool passed = false;
};

struct PpReport {
  PpCheck a;  // E|Y_1| positive, stable under replicate doubling
  PpCheck b;  // E int l(1,x)^2 dx, stable under halving the bin width
  PpCheck c;  // density max (KDE), stable under halving the bandwidth (soft)
  PpCheck d;  // E sup |Y_t|, stable under replicate doubling
  bool all_passed() const { return a.passed && b.passed && c.passed && d.passed; }
};

PpReport check_pp_conditions(const RecursionState& state, Index replicates, const RandomStream& stream);

}  // namespace rwrt
