#pragma once

namespace sdc::blackscholes {

enum class OptionType : int { Call = 0, Put = 1 };

struct OptionParams {
  double spot = 0.0;
  double strike = 0.0;
  double rate = 0.0;
  double dividend = 0.0;
  double volatility = 0.0;
  double maturity = 0.0;
  OptionType type = OptionType::Call;
};

/// Abramowitz-Stegun 26.2.17 polynomial approximation of the standard normal
/// CDF (|error| < 7.5e-8). Evaluated for |x| and reflected, so
/// cndf(x) + cndf(-x) == 1.
double cndf(double x);

/// Closed-form European option price with continuous dividend yield.
/// Throws std::invalid_argument unless spot, strike, volatility, maturity > 0.
double price(const OptionParams& p);

/// Weighted op count of price(): add/sub/mul/compare 1, div 4, sqrt 8,
/// exp/log 20.
///   log(S/K)            24    sqrt(T)       8    sigma*sqrt(T)   1
///   d1                  10    d2            1    exp(-rT)       21
///   exp(-qT)            21    2 x cndf     86    payoff          7
inline constexpr double kTaskCost = 179.0;

}  // namespace sdc::blackscholes
