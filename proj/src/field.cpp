#include "svcgp/field.hpp"

#include <cmath>

#include "svcgp/errors.hpp"

namespace svcgp {

SpaceTimeField select_periods(const SpaceTimeField& field,
                              const std::vector<int>& cols) {
  SpaceTimeField out;
  out.points = field.points;
  out.values.resize(field.n(), static_cast<int>(cols.size()));
  out.periods.reserve(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] < 0 || cols[i] >= field.T())
      throw DomainError("select_periods: column out of range");
    out.values.col(static_cast<int>(i)) = field.values.col(cols[i]);
    out.periods.push_back(field.periods[cols[i]]);
  }
  return out;
}

TrainTestSplit split_train_test(const SpaceTimeField& field, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split_train_test: fraction must be in (0,1)");
  const int T = field.T();
  const int n_train = static_cast<int>(std::floor(T * fraction));
  if (n_train < 1 || n_train >= T)
    throw ConfigError("split_train_test: degenerate split for T=" +
                      std::to_string(T));
  std::vector<int> head, tail;
  for (int t = 0; t < n_train; ++t) head.push_back(t);
  for (int t = n_train; t < T; ++t) tail.push_back(t);
  return {select_periods(field, head), select_periods(field, tail)};
}

}  // namespace svcgp
