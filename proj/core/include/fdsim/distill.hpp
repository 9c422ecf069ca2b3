#pragma once

#include <span>
#include <vector>

#include "fdsim/aggregate.hpp"
#include "fdsim/logits.hpp"
#include "fdsim/lora.hpp"
#include "fdsim/tensor.hpp"

namespace fdsim {

struct DistillConfig {
    double temperature = 2.0;
    double lambda_h = 0.03;          // weight of the projection loss term
    bool t_squared_scaling = false;  // multiply gradients by T^2 (off: follow the loss as written)
    bool mask_uncovered = false;     // drop coverage-0 dims from both distributions

    void validate() const;

    bool operator==(const DistillConfig&) const = default;
};

/// softmax(v / T), computed with max subtraction.
std::vector<double> tempered_softmax(std::span<const double> v, double temperature);

/// sum p ln(p/q) with q clamped below at 1e-12 and 0 ln(0/x) taken as 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct LossGrad {
    double loss = 0.0;
    Tensor2D d_student;  // same shape as the student input
};

/// Mean-over-samples KL(softmax(teacher/T) || softmax(student/T)) and its
/// gradient w.r.t. the student logits, (q - p) / (T * num_samples).
LossGrad logits_distill_loss(const AggregatedLogits& teacher, const DenseLogits& student,
                             const DistillConfig& cfg);

/// Same tempered-KL loss over projection vectors of equal rank.
LossGrad projection_distill_loss(const ProjectionBundle& teacher, const ProjectionBundle& student,
                                 const DistillConfig& cfg);

struct TotalDistillLoss {
    double loss = 0.0;
    double loss_logits = 0.0;
    double loss_h = 0.0;
    Tensor2D d_student_logits;
    Tensor2D d_student_h;  // already scaled by lambda_h; empty when unused
};

/// loss_logits + lambda_h * loss_h. teacher_h/student_h may be null when the
/// strategy distills logits only (treated as lambda_h = 0).
TotalDistillLoss total_distill_loss(const AggregatedLogits& teacher_logits,
                                    const ProjectionBundle* teacher_h,
                                    const DenseLogits& student_logits,
                                    const ProjectionBundle* student_h, const DistillConfig& cfg);

}  // namespace fdsim
