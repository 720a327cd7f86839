#include "sdc/kernels/blackscholes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdc::blackscholes {

double cndf(double x) {
  constexpr double p = 0.2316419;
  constexpr double b1 = 0.319381530;
  constexpr double b2 = -0.356563782;
  constexpr double b3 = 1.781477937;
  constexpr double b4 = -1.821255978;
  constexpr double b5 = 1.330274429;
  if (x == 0.0) return 0.5;
  const double ax = std::abs(x);
  const double k = 1.0 / (1.0 + p * ax);
  const double poly = k * (b1 + k * (b2 + k * (b3 + k * (b4 + k * b5))));
  const double pdf = std::exp(-0.5 * ax * ax) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = pdf * poly;
  return x < 0.0 ? tail : 1.0 - tail;
}

double price(const OptionParams& o) {
  if (!(o.spot > 0.0) || !(o.strike > 0.0) || !(o.volatility > 0.0) || !(o.maturity > 0.0))
    throw std::invalid_argument("blackscholes: spot, strike, volatility and maturity must be positive");
  const double sqrt_t = std::sqrt(o.maturity);
  const double vol_sqrt_t = o.volatility * sqrt_t;
  const double d1 =
      (std::log(o.spot / o.strike) + (o.rate - o.dividend + 0.5 * o.volatility * o.volatility) * o.maturity) /
      vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  const double disc_r = std::exp(-o.rate * o.maturity);
  const double disc_q = std::exp(-o.dividend * o.maturity);
  const double n1 = cndf(d1);
  const double n2 = cndf(d2);
  if (o.type == OptionType::Call) return o.spot * disc_q * n1 - o.strike * disc_r * n2;
  return o.strike * disc_r * (1.0 - n2) - o.spot * disc_q * (1.0 - n1);
}

}  // namespace sdc::blackscholes
