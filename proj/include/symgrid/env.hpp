#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "symgrid/value.hpp"

namespace symgrid {

/// Gaussian noise source declared in a Distributions group.
struct Distribution {
    std::string name;
    double mean = 0.0;
    double dev = 0.0;
};

/// Seeded generator shared by every scope of one run.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    double standard_normal() { return normal_(engine_); }
    /// Real context: one draw. Complex context: independent draws for both parts.
    Value sample(const Distribution& d, Domain context);

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Name -> typed value store for one model scope.
class Env {
  public:
    struct Binding {
        Value value;
        ValueType type = ValueType::Real;
        bool variable = false;
    };

    explicit Env(Domain domain = Domain::Real, Env* parent = nullptr, Rng* rng = nullptr)
        : domain_(domain), parent_(parent), rng_(rng) {}

    Domain domain() const { return domain_; }
    Env* parent() const { return parent_; }
    Rng* rng() const { return rng_; }
    void set_rng(Rng* rng) { rng_ = rng; }

    bool contains(std::string_view name) const;
    const Binding* find(std::string_view name) const;
    /// Throws EvalError for an unbound name. Never consults the parent scope.
    const Value& get(std::string_view name) const;

    /// Creates or replaces a binding; the value is coerced to `type`.
    void define(const std::string& name, Value value, ValueType type, bool variable);
    /// Replaces the value of an existing binding, coercing to its declared type.
    void assign(std::string_view name, Value value);
    /// Writes one component of an existing complex binding.
    void assign_component(std::string_view name, bool imag_part, double x);

    /// Names in first-definition order.
    const std::vector<std::string>& names() const { return order_; }

    std::map<std::string, Distribution, std::less<>> distributions;

  private:
    Domain domain_;
    Env* parent_;
    Rng* rng_;
    std::unordered_map<std::string, Binding> bindings_;
    std::vector<std::string> order_;
};

/// Converts `v` for storage in a slot of type `t` (Int rounds, Real rejects a nonzero
/// imaginary part, Complex promotes). Throws EvalError on a mismatch.
Value coerce(ValueType t, const Value& v, std::string_view name);

/// Parses a `[type=...]` spelling; complex synonyms are accepted.
std::optional<ValueType> parse_value_type(std::string_view text);

}  // namespace symgrid
