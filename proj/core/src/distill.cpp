#include "fdsim/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdsim {

namespace {

constexpr double kQFloor = 1e-12;

/// Tempered softmax over the masked subset of a row; unmasked positions
/// get probability 0. mask == nullptr means all positions live.
void masked_tempered_softmax(const double* row, std::size_t n, double temperature,
                             const std::uint32_t* coverage, std::vector<double>& out) {
    out.assign(n, 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (coverage == nullptr || coverage[j] > 0) {
            mx = std::max(mx, row[j] / temperature);
        }
    }
    if (!std::isfinite(mx)) {
        return;  // nothing covered
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (coverage == nullptr || coverage[j] > 0) {
            out[j] = std::exp(row[j] / temperature - mx);
            denom += out[j];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        out[j] /= denom;
    }
}

LossGrad tempered_kl_rows(const Tensor2D& teacher, const Tensor2D& student,
                          const CoverageGrid* coverage, const DistillConfig& cfg) {
    if (teacher.rows != student.rows || teacher.cols != student.cols) {
        throw ShapeError("distill: teacher/student shape mismatch");
    }
    if (teacher.rows == 0) {
        throw InputError("distill: no samples");
    }
    cfg.validate();
    const std::size_t n = teacher.rows;
    const std::size_t c = teacher.cols;
    const double t = cfg.temperature;
    const double grad_scale =
        (cfg.t_squared_scaling ? t * t : 1.0) / (t * static_cast<double>(n));

    LossGrad result;
    result.d_student = Tensor2D(n, c);
    std::vector<double> p;
    std::vector<double> q;
    double total = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const std::uint32_t* cov = coverage != nullptr ? &coverage->counts[x * c] : nullptr;
        masked_tempered_softmax(teacher.row(x), c, t, cov, p);
        masked_tempered_softmax(student.row(x), c, t, cov, q);
        bool any = false;
        for (std::size_t j = 0; j < c; ++j) {
            if (cov == nullptr || cov[j] > 0) {
                any = true;
                break;
            }
        }
        if (!any) {
            continue;  // fully uncovered sample contributes nothing
        }
        total += kl_divergence(p, q);
        double* grad = result.d_student.row(x);
        for (std::size_t j = 0; j < c; ++j) {
            if (cov == nullptr || cov[j] > 0) {
                grad[j] = (q[j] - p[j]) * grad_scale;
            }
        }
    }
    result.loss = total / static_cast<double>(n);
    return result;
}

}  // namespace

void DistillConfig::validate() const {
    if (!(temperature > 0.0)) {
        throw InputError("DistillConfig: temperature must be > 0");
    }
    if (!std::isfinite(lambda_h) || lambda_h < 0.0) {
        throw InputError("DistillConfig: lambda_h must be finite and >= 0");
    }
}

std::vector<double> tempered_softmax(std::span<const double> v, double temperature) {
    if (!(temperature > 0.0)) {
        throw InputError("tempered_softmax: temperature must be > 0");
    }
    std::vector<double> out(v.size());
    if (v.empty()) {
        return out;
    }
    double mx = v[0] / temperature;
    for (double x : v) {
        mx = std::max(mx, x / temperature);
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        out[j] = std::exp(v[j] / temperature - mx);
        denom += out[j];
    }
    for (double& x : out) {
        x /= denom;
    }
    return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw ShapeError("kl_divergence: length mismatch");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) {
            total += p[j] * std::log(p[j] / std::max(q[j], kQFloor));
        }
    }
    return total;
}

LossGrad logits_distill_loss(const AggregatedLogits& teacher, const DenseLogits& student,
                             const DistillConfig& cfg) {
    const CoverageGrid* coverage = cfg.mask_uncovered ? &teacher.coverage : nullptr;
    return tempered_kl_rows(teacher.values, student.values, coverage, cfg);
}

LossGrad projection_distill_loss(const ProjectionBundle& teacher, const ProjectionBundle& student,
                                 const DistillConfig& cfg) {
    if (teacher.rank != student.rank) {
        throw ShapeError("projection_distill_loss: rank mismatch");
    }
    return tempered_kl_rows(teacher.values, student.values, nullptr, cfg);
}

TotalDistillLoss total_distill_loss(const AggregatedLogits& teacher_logits,
                                    const ProjectionBundle* teacher_h,
                                    const DenseLogits& student_logits,
                                    const ProjectionBundle* student_h, const DistillConfig& cfg) {
    TotalDistillLoss total;
    LossGrad logits_part = logits_distill_loss(teacher_logits, student_logits, cfg);
    total.loss_logits = logits_part.loss;
    total.d_student_logits = std::move(logits_part.d_student);

    const bool use_h = cfg.lambda_h > 0.0 && teacher_h != nullptr && student_h != nullptr &&
                       teacher_h->rank > 0;
    if (use_h) {
        LossGrad h_part = projection_distill_loss(*teacher_h, *student_h, cfg);
        total.loss_h = h_part.loss;
        total.d_student_h = std::move(h_part.d_student);
        for (double& v : total.d_student_h.data) {
            v *= cfg.lambda_h;
        }
    }
    total.loss = total.loss_logits + cfg.lambda_h * total.loss_h;
    return total;
}

}  // namespace fdsim
