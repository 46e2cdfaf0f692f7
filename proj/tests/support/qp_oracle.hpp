#pragma once

// Generic convex QP in standard form, solved by a dense primal-dual interior-point
// method. Only used as an independent reference in tests.
//
//   minimize 1/2 z'Hz + f'z  subject to  Az = b,  z >= 0

#include <Eigen/Dense>

namespace oracle {

struct StandardQP {
    Eigen::MatrixXd H;
    Eigen::VectorXd f;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct QPResult {
    Eigen::VectorXd z;
    /// Multipliers of Az = b, sign convention H z + f - A'y - s = 0.
    Eigen::VectorXd y;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

QPResult solve(const StandardQP &qp, double tol = 1e-11, int max_iter = 200);

}  // namespace oracle
