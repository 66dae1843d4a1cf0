#pragma once

#include "vineuq/margins.hpp"
#include "vineuq/model.hpp"
#include "vineuq/types.hpp"
#include "vineuq/vine.hpp"

#include <atomic>
#include <memory>
#include <span>
#include <vector>

namespace vuq {

/// Standard-normal values beyond this magnitude are clamped (Phi saturates).
inline constexpr double kZClamp = 8.2;

/// Map between physical space X and an independent space Z:
/// z_i = Psi_i^{-1}(w_i), w = Rosenblatt(copula, F(x)).
class IsoTransform {
public:
    /// Targets default to standard normal in every component.
    explicit IsoTransform(InputModel input, std::vector<Marginal> targets = {});

    std::size_t dimension() const { return input_.dimension(); }
    const InputModel& input_model() const { return input_; }
    const std::vector<Marginal>& targets() const { return targets_; }

    void forward(std::span<const double> x, std::span<double> z) const;
    void inverse(std::span<const double> z, std::span<double> x) const;
    Matrix forward(const Matrix& x) const;
    Matrix inverse(const Matrix& z) const;

    /// Number of standard-normal components clamped to |z| = kZClamp so far.
    std::size_t clamp_count() const { return clamps_->load(); }

private:
    double clamp_z(std::size_t i, double z) const;

    InputModel input_;
    std::vector<Marginal> targets_;
    std::shared_ptr<std::atomic<std::size_t>> clamps_;
};

/// The model seen from Z: evaluate(z) = model(T^{-1}(z)).
class CompositionalModel final : public ComputationalModel {
public:
    CompositionalModel(ModelPtr model, IsoTransform transform);

    double evaluate(std::span<const double> z) const override;
    std::size_t dimension() const override { return transform_.dimension(); }
    std::string name() const override { return model_->name() + "-z"; }
    bool thread_safe() const override { return model_->thread_safe(); }

    const ComputationalModel& model() const { return *model_; }
    const IsoTransform& transform() const { return transform_; }

private:
    ModelPtr model_;
    IsoTransform transform_;
};

CompositionalModel compose(ModelPtr model, IsoTransform transform);

}  // namespace vuq
