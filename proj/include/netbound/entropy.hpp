#pragma once

#include <vector>

#include "netbound/netmodel.hpp"

namespace netbound {

// Entropy in bits. The value is exact when every probability involved
// is a reciprocal power of two; otherwise only the numeric estimate is
// meaningful.
struct EntropyValue {
    bool exact = false;
    mpq_class bits;
    long double approx = 0.0L;
};

// H(target | given) over a joint table; both subsets are variable
// indices into the distribution
EntropyValue conditional_entropy(const TinyJointDistribution& joint, std::vector<int> target,
                                 std::vector<int> given);

// One value per cut of the chain: the conditional entropy of the
// receive signals outside cut j given the transmit signals outside cut
// j and the receive signals outside cut j-1 (everything is inside the
// zeroth cut). The distribution ranges over the transmit nodes, layer
// by layer, with one field symbol each.
std::vector<EntropyValue> entropy_bound_terms(const LayeredNetwork& net, const CutChain& chain,
                                              const TinyJointDistribution& dist);

}  // namespace netbound
