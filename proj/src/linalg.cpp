// SPDX-License-Identifier: Apache-2.0
//
// dmisac: bounds and estimators for distributed multi-static ISAC sensing
// Copyright (C) 2026 The dmisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dmisac/linalg.hpp"

#include <cmath>
#include <limits>

#include "dmisac/error.hpp"

namespace dmisac
{
    namespace
    {
        Eigen::VectorXd equilibration(const Eigen::MatrixXd &j)
        {
            Eigen::VectorXd d(j.rows());
            for (Eigen::Index i = 0; i < j.rows(); ++i)
            {
                const double v = std::abs(j(i, i));
                d[i] = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
            }
            return d;
        }

        double condition_from(const Eigen::VectorXd &eig)
        {
            const double hi = eig.cwiseAbs().maxCoeff();
            const double lo = eig.minCoeff();
            if (!(lo > 0.0))
                return std::numeric_limits<double>::infinity();
            return hi / lo;
        }
    }

    double equilibrated_condition(const Eigen::MatrixXd &j)
    {
        if (j.size() == 0)
            return 0.0;
        const Eigen::VectorXd d = equilibration(j);
        const Eigen::MatrixXd s = d.asDiagonal() * j * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        return condition_from(es.eigenvalues());
    }

    SymmetricInverse symmetric_inverse(const Eigen::MatrixXd &j, double max_condition, bool allow_pseudo,
                                       const char *what)
    {
        if (j.rows() != j.cols())
            throw Error(ErrorCode::Precondition, std::string(what) + " is not square");
        if (!j.allFinite())
            throw Error(ErrorCode::NumericFailure, std::string(what) + " has non-finite entries");

        const Eigen::VectorXd d = equilibration(j);
        const Eigen::MatrixXd s = d.asDiagonal() * j * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        const Eigen::VectorXd &ev = es.eigenvalues();

        SymmetricInverse out;
        out.condition = condition_from(ev);
        out.min_eigenvalue = ev.size() ? ev.minCoeff() : 0.0;

        if (!(out.condition <= max_condition))
        {
            if (!allow_pseudo)
                throw Error(ErrorCode::SingularInformation,
                            std::string(what) + " is singular or ill-conditioned (condition number " +
                                std::to_string(out.condition) +
                                "); add links, use a nonzero velocity, or move the target off the degenerate geometry");
            const double cut = ev.cwiseAbs().maxCoeff() / max_condition;
            Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(ev.size());
            for (Eigen::Index i = 0; i < ev.size(); ++i)
                if (ev[i] > cut)
                    inv_ev[i] = 1.0 / ev[i];
            const Eigen::MatrixXd &v = es.eigenvectors();
            out.inverse = d.asDiagonal() * (v * inv_ev.asDiagonal() * v.transpose()) * d.asDiagonal();
            out.pseudo = true;
            return out;
        }

        Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
        const Eigen::MatrixXd sinv = ldlt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
        out.inverse = d.asDiagonal() * sinv * d.asDiagonal();
        out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
        return out;
    }
}
