#pragma once

#include "odekit/state.hpp"

namespace odekit {

// Per-element fused multiply-add kernels. The sum is always accumulated left
// to right: s1 = a1*s2 + a2*s3 + ... so that every backend reproduces the
// serial result bit for bit.
struct default_operations {
    struct scale_sum2 {
        scalar a1, a2;
        void operator()(scalar& t, scalar x1, scalar x2) const { t = a1 * x1 + a2 * x2; }
    };

    struct scale_sum3 {
        scalar a1, a2, a3;
        void operator()(scalar& t, scalar x1, scalar x2, scalar x3) const {
            t = a1 * x1 + a2 * x2 + a3 * x3;
        }
    };

    struct scale_sum4 {
        scalar a1, a2, a3, a4;
        void operator()(scalar& t, scalar x1, scalar x2, scalar x3, scalar x4) const {
            t = a1 * x1 + a2 * x2 + a3 * x3 + a4 * x4;
        }
    };

    struct scale_sum5 {
        scalar a1, a2, a3, a4, a5;
        void operator()(scalar& t, scalar x1, scalar x2, scalar x3, scalar x4, scalar x5) const {
            t = a1 * x1 + a2 * x2 + a3 * x3 + a4 * x4 + a5 * x5;
        }
    };
};

using scale_sum2 = default_operations::scale_sum2;
using scale_sum3 = default_operations::scale_sum3;
using scale_sum4 = default_operations::scale_sum4;
using scale_sum5 = default_operations::scale_sum5;

}  // namespace odekit
