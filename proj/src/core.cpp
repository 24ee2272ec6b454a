#include "cufair/core.hpp"

#include <cmath>

namespace cufair {

const AttributeValue* Attributes::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

double Attributes::number(std::string_view name) const {
  const auto* v = find(name);
  if (v == nullptr || !std::holds_alternative<double>(*v)) {
    throw InvalidArgument("attribute '" + std::string(name) +
                          "' is missing or not numeric");
  }
  return std::get<double>(*v);
}

const std::string& Attributes::text(std::string_view name) const {
  const auto* v = find(name);
  if (v == nullptr || !std::holds_alternative<std::string>(*v)) {
    throw InvalidArgument("attribute '" + std::string(name) +
                          "' is missing or not text");
  }
  return std::get<std::string>(*v);
}

Population::Population(std::vector<Entry> entries, std::size_t group_count)
    : group_count_(group_count), total_(0.0) {
  if (group_count_ < 2) {
    throw InvalidModel("a population declares at least two groups");
  }
  individuals_.reserve(entries.size());
  weights_.reserve(entries.size());
  for (auto& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InvalidModel("population weights must be finite and non-negative");
    }
    if (e.individual.group.value >= group_count_) {
      throw InvalidModel("group id " +
                         std::to_string(e.individual.group.value) +
                         " is not below group count " +
                         std::to_string(group_count_));
    }
    total_ += e.weight;
    weights_.push_back(e.weight);
    individuals_.push_back(std::move(e.individual));
  }
  if (!(total_ > 0.0)) {
    throw InvalidModel("population has zero total weight");
  }
}

Mask evaluate_event(const Population& pop, const EventPredicate& event) {
  Mask out(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out[i] = event(pop.individual(i)) ? 1 : 0;
  }
  return out;
}

Mask group_mask(const Population& pop, GroupId group) {
  Mask out(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out[i] = pop.group(i) == group ? 1 : 0;
  }
  return out;
}

Mask mask_and(const Mask& a, const Mask& b) {
  if (a.size() != b.size()) throw InvalidArgument("mask size mismatch");
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

Mask mask_not(const Mask& a) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ? 0 : 1;
  return out;
}

double mass(const Population& pop, const Mask& mask) {
  if (mask.size() != pop.size()) throw InvalidArgument("mask size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (mask[i]) sum += pop.weight(i);
  }
  return sum;
}

double conditional_probability(const Population& pop, const Mask& event,
                               const Mask& cond) {
  if (event.size() != pop.size() || cond.size() != pop.size()) {
    throw InvalidArgument("mask size mismatch");
  }
  double joint = 0.0;
  double given = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!cond[i]) continue;
    given += pop.weight(i);
    if (event[i]) joint += pop.weight(i);
  }
  if (!(given > 0.0)) {
    throw ZeroConditionMass("conditioning event has zero probability mass");
  }
  return joint / given;
}

double conditional_probability(const Population& pop,
                               const EventPredicate& event,
                               const EventPredicate& cond) {
  return conditional_probability(pop, evaluate_event(pop, event),
                                 evaluate_event(pop, cond));
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exponent) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > kUnboundedSize / base) return kUnboundedSize;
    result *= base;
  }
  return result;
}

namespace detail {

double checked_utility(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw InvalidModel(std::string(what) + " value is not finite");
  }
  return value;
}

}  // namespace detail

}  // namespace cufair
