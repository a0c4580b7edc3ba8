#include "grasp/lmi.hpp"

#include <cmath>

#include "grasp/errors.hpp"

namespace grasp {

namespace {

void check_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                  const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (A.cols() != n) throw DomainError("lmi: A not square");
    if (B.rows() != n) throw DomainError("lmi: B row count mismatch");
    if (P.rows() != n || P.cols() != n) throw DomainError("lmi: P shape mismatch");
    if (Y.rows() != m || Y.cols() != n) throw DomainError("lmi: Y shape mismatch");
}

double max_eigenvalue(const Eigen::MatrixXd& M) {
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .maxCoeff();
}

// one packed variable expanded into its (dP, dY, dgamma) direction
struct VarBasis {
    Eigen::MatrixXd dP;
    Eigen::MatrixXd dY;
    double dgamma = 0.0;
};

VarBasis var_basis(int index, int n, int m) {
    VarBasis b;
    b.dP = Eigen::MatrixXd::Zero(n, n);
    b.dY = Eigen::MatrixXd::Zero(m, n);
    int k = 0;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) {
            if (k == index) {
                b.dP(r, c) = 1.0;
                b.dP(c, r) = 1.0;
                return b;
            }
            ++k;
        }
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < m; ++r) {
            if (k == index) {
                b.dY(r, c) = 1.0;
                return b;
            }
            ++k;
        }
    b.dgamma = 1.0;
    return b;
}

}  // namespace

void DRegion::validate() const {
    if (!(alpha >= 0.0)) throw DomainError("region: alpha must be nonnegative");
    if (!(r > alpha)) throw DomainError("region: radius must exceed alpha");
    if (!(theta > 0.0 && theta < 1.5707963267948966))
        throw DomainError("region: theta must lie in (0, pi/2)");
}

int num_decision_vars(int n, int m) { return n * (n + 1) / 2 + n * m + 1; }

Eigen::VectorXd pack_decision_vars(const DecisionVars& vars) {
    const int n = static_cast<int>(vars.P.rows());
    const int m = static_cast<int>(vars.Y.rows());
    Eigen::VectorXd x(num_decision_vars(n, m));
    int k = 0;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) x(k++) = vars.P(r, c);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < m; ++r) x(k++) = vars.Y(r, c);
    x(k) = vars.gamma;
    return x;
}

DecisionVars unpack_decision_vars(const Eigen::VectorXd& x, int n, int m) {
    if (x.size() != num_decision_vars(n, m))
        throw DomainError("lmi: packed variable size mismatch");
    DecisionVars vars;
    vars.P.setZero(n, n);
    vars.Y.setZero(m, n);
    int k = 0;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r <= c; ++r) {
            vars.P(r, c) = x(k);
            vars.P(c, r) = x(k);
            ++k;
        }
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < m; ++r) vars.Y(r, c) = x(k++);
    vars.gamma = x(k);
    return vars;
}

std::array<Eigen::MatrixXd, 4> dregion_blocks(const Eigen::MatrixXd& A,
                                              const Eigen::MatrixXd& B,
                                              const DRegion& region,
                                              const DecisionVars& vars) {
    region.validate();
    check_shapes(A, B, vars.P, vars.Y);
    const int n = static_cast<int>(A.rows());
    const double s = std::sin(region.theta);
    const double c = std::cos(region.theta);
    const Eigen::MatrixXd X = A * vars.P - B * vars.Y;
    const Eigen::MatrixXd Xs = X + X.transpose();
    const Eigen::MatrixXd Xk = X - X.transpose();

    std::array<Eigen::MatrixXd, 4> f;
    f[0] = Xs + 2.0 * region.alpha * vars.P;
    f[1].setZero(2 * n, 2 * n);
    f[1].topLeftCorner(n, n) = -region.r * vars.P;
    f[1].bottomRightCorner(n, n) = -region.r * vars.P;
    f[1].topRightCorner(n, n) = X;
    f[1].bottomLeftCorner(n, n) = X.transpose();
    f[2].setZero(2 * n, 2 * n);
    f[2].topLeftCorner(n, n) = s * Xs;
    f[2].bottomRightCorner(n, n) = s * Xs;
    f[2].topRightCorner(n, n) = c * Xk;
    f[2].bottomLeftCorner(n, n) = -c * Xk;
    f[3] = -vars.P;
    return f;
}

Eigen::VectorXd evaluate_constraint(const DecisionVars& vars, const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, const DRegion& region) {
    const std::array<Eigen::MatrixXd, 4> f = dregion_blocks(A, B, region, vars);
    Eigen::VectorXd margins(4);
    for (int k = 0; k < 4; ++k) {
        const int d = static_cast<int>(f[k].rows());
        margins(k) = max_eigenvalue(f[k] - vars.gamma * Eigen::MatrixXd::Identity(d, d));
    }
    return margins;
}

Eigen::MatrixXd recover_gain(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y) {
    if (P.rows() != P.cols() || Y.cols() != P.rows())
        throw DomainError("lmi: gain recovery shape mismatch");
    const Eigen::MatrixXd S = 0.5 * (P + P.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-10)
        throw DomainError("lmi: certificate not positive definite");
    return S.llt().solve(Y.transpose()).transpose();
}

PoleCheck pole_region_check(const Eigen::MatrixXd& A_cl, const DRegion& region) {
    region.validate();
    if (A_cl.rows() != A_cl.cols()) throw DomainError("lmi: closed loop not square");
    const double t = std::tan(region.theta);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(A_cl);
    PoleCheck out;
    out.inside = true;
    out.margins.reserve(static_cast<std::size_t>(A_cl.rows()));
    for (int i = 0; i < A_cl.rows(); ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        const double decay = lam.real() + region.alpha;
        const double radius = std::abs(lam) - region.r;
        const double cone = std::abs(lam.imag()) - t * (-lam.real());
        const double margin = std::max(decay, std::max(radius, cone));
        out.margins.push_back(margin);
        if (!(margin < 0.0)) out.inside = false;
    }
    return out;
}

void append_scenario_blocks(SdpProblem& problem, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const DRegion& region,
                            double eta) {
    region.validate();
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    check_shapes(A, B, Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(m, n));
    if (problem.num_vars != num_decision_vars(n, m))
        throw DomainError("lmi: problem variable count mismatch");
    const double s = std::sin(region.theta);
    const double c = std::cos(region.theta);

    LmiBlock decay, radius, cone;
    decay.F0 = eta * Eigen::MatrixXd::Identity(n, n);
    radius.F0 = eta * Eigen::MatrixXd::Identity(2 * n, 2 * n);
    cone.F0 = eta * Eigen::MatrixXd::Identity(2 * n, 2 * n);
    decay.coeff.reserve(problem.num_vars);
    radius.coeff.reserve(problem.num_vars);
    cone.coeff.reserve(problem.num_vars);

    for (int v = 0; v < problem.num_vars; ++v) {
        const VarBasis b = var_basis(v, n, m);
        const Eigen::MatrixXd dX = A * b.dP - B * b.dY;
        const Eigen::MatrixXd dXs = dX + dX.transpose();
        const Eigen::MatrixXd dXk = dX - dX.transpose();
        const Eigen::MatrixXd gI_n =
            b.dgamma * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd gI_2n =
            b.dgamma * Eigen::MatrixXd::Identity(2 * n, 2 * n);

        decay.coeff.push_back(dXs + 2.0 * region.alpha * b.dP - gI_n);

        Eigen::MatrixXd f2 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        f2.topLeftCorner(n, n) = -region.r * b.dP;
        f2.bottomRightCorner(n, n) = -region.r * b.dP;
        f2.topRightCorner(n, n) = dX;
        f2.bottomLeftCorner(n, n) = dX.transpose();
        radius.coeff.push_back(f2 - gI_2n);

        Eigen::MatrixXd f3 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        f3.topLeftCorner(n, n) = s * dXs;
        f3.bottomRightCorner(n, n) = s * dXs;
        f3.topRightCorner(n, n) = c * dXk;
        f3.bottomLeftCorner(n, n) = -c * dXk;
        cone.coeff.push_back(f3 - gI_2n);
    }
    problem.blocks.push_back(std::move(decay));
    problem.blocks.push_back(std::move(radius));
    problem.blocks.push_back(std::move(cone));
}

void append_common_blocks(SdpProblem& problem, int n, int m, double eta) {
    if (problem.num_vars != num_decision_vars(n, m))
        throw DomainError("lmi: problem variable count mismatch");
    LmiBlock pos;
    pos.F0 = eta * Eigen::MatrixXd::Identity(n, n);
    pos.coeff.reserve(problem.num_vars);
    for (int v = 0; v < problem.num_vars; ++v) {
        const VarBasis b = var_basis(v, n, m);
        pos.coeff.push_back(-b.dP -
                            b.dgamma * Eigen::MatrixXd::Identity(n, n));
    }
    problem.blocks.push_back(std::move(pos));
}

void append_certificate_cap(SdpProblem& problem, int n, int m, double mu) {
    if (problem.num_vars != num_decision_vars(n, m))
        throw DomainError("lmi: problem variable count mismatch");
    if (!(mu > 0.0)) throw DomainError("lmi: cap must be positive");
    LmiBlock cap;
    cap.F0 = -mu * Eigen::MatrixXd::Identity(n, n);
    cap.coeff.reserve(problem.num_vars);
    for (int v = 0; v < problem.num_vars; ++v)
        cap.coeff.push_back(var_basis(v, n, m).dP);
    problem.blocks.push_back(std::move(cap));
}

void append_gain_cap(SdpProblem& problem, int n, int m, double mu) {
    if (problem.num_vars != num_decision_vars(n, m))
        throw DomainError("lmi: problem variable count mismatch");
    if (!(mu > 0.0)) throw DomainError("lmi: cap must be positive");
    LmiBlock cap;
    cap.F0 = -mu * Eigen::MatrixXd::Identity(n + m, n + m);
    cap.coeff.reserve(problem.num_vars);
    for (int v = 0; v < problem.num_vars; ++v) {
        const VarBasis b = var_basis(v, n, m);
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n + m, n + m);
        C.topRightCorner(m, n) = b.dY;
        C.bottomLeftCorner(n, m) = b.dY.transpose();
        cap.coeff.push_back(C);
    }
    problem.blocks.push_back(std::move(cap));
}

}  // namespace grasp
