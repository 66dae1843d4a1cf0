#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>

namespace vuq {

/// Deterministic black-box map from an M-vector to a scalar response.
class ComputationalModel {
public:
    virtual ~ComputationalModel() = default;

    virtual double evaluate(std::span<const double> x) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;

    /// False for models that must not be evaluated from several threads at
    /// once (external processes, for instance). Batch runners fall back to
    /// serial evaluation.
    virtual bool thread_safe() const { return true; }
};

using ModelPtr = std::shared_ptr<const ComputationalModel>;

/// Adapts a callable.
class FunctionModel final : public ComputationalModel {
public:
    using Fn = std::function<double(std::span<const double>)>;

    FunctionModel(std::string name, std::size_t dim, Fn fn, bool thread_safe = true)
        : name_(std::move(name)), dim_(dim), fn_(std::move(fn)), thread_safe_(thread_safe) {}

    double evaluate(std::span<const double> x) const override { return fn_(x); }
    std::size_t dimension() const override { return dim_; }
    std::string name() const override { return name_; }
    bool thread_safe() const override { return thread_safe_; }

private:
    std::string name_;
    std::size_t dim_;
    Fn fn_;
    bool thread_safe_;
};

}  // namespace vuq
