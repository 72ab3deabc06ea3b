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

#include "dmisac/quadrature.hpp"

#include <algorithm>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dmisac/error.hpp"

namespace dmisac
{
    namespace
    {
        struct Panel
        {
            double a, b;
            cplx value;
            double error, l1;
            bool operator<(const Panel &o) const { return error < o.error; }
        };

        template <class F>
        Panel panel(const F &f, double a, double b)
        {
            using boost::math::quadrature::gauss_kronrod;
            Panel p{a, b, {}, 0.0, 0.0};
            p.value = cplx(gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error, &p.l1));
            // boost reports the single-panel error on the reference interval [-1, 1]
            p.error *= 0.5 * (b - a);
            return p;
        }

        // Global adaptive bisection: always split the panel with the largest error estimate until the
        // summed estimate meets rel_tol times the summed L1 norm. Boost's recursive driver only
        // compares each panel against its own value, which never terminates in a Gaussian tail.
        template <class F>
        QuadratureResult adaptive(const F &f, double a, double b, double rel_tol, unsigned max_depth)
        {
            std::priority_queue<Panel> heap;
            heap.push(panel(f, a, b));
            const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 20u);
            double error = heap.top().error, l1 = heap.top().l1;
            while (error > rel_tol * l1 && l1 > 0.0 && heap.size() < max_panels)
            {
                const Panel worst = heap.top();
                heap.pop();
                const double mid = 0.5 * (worst.a + worst.b);
                const Panel left = panel(f, worst.a, mid), right = panel(f, mid, worst.b);
                error += left.error + right.error - worst.error;
                l1 += left.l1 + right.l1 - worst.l1;
                heap.push(left);
                heap.push(right);
            }
            QuadratureResult r;
            for (; !heap.empty(); heap.pop())
            {
                r.value += heap.top().value;
                r.error += heap.top().error;
                r.l1 += heap.top().l1;
            }
            if (!(r.error <= rel_tol * r.l1) && r.l1 > 0.0)
                throw NumericFailure("adaptive quadrature did not converge", r.error / r.l1);
            return r;
        }
    }

    QuadratureResult integrate(const std::function<cplx(double)> &f, double a, double b, double rel_tol,
                               unsigned max_depth)
    {
        return adaptive(f, a, b, rel_tol, max_depth);
    }

    double integrate_real(const std::function<double(double)> &f, double a, double b, double rel_tol,
                          unsigned max_depth)
    {
        return adaptive(f, a, b, rel_tol, max_depth).value.real();
    }
}
