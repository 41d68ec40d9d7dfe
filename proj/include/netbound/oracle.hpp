#pragma once

#include <functional>
#include <optional>
#include <string>

#include "netbound/bounds.hpp"
#include "netbound/netmodel.hpp"

namespace netbound {

// Ground truth produced by direct enumeration. Only the fields the
// producing check fills in are meaningful.
struct OracleResult {
    bool verdict = false;
    std::optional<ExactMatrix> witness;  // relay map found by the scheme search
    bool exact = false;
    mpq_class value;      // entropy in bits when exact
    std::string decimal;  // entropy in bits, printed
    std::uint64_t enumerated = 0;
    std::string note;
};

// Tries every one-shot linear relay assignment of a three-layer K-pair
// network over GF(2). Relays act independently, so only assignments
// where each relay scales its own received symbol are realizable; the
// full matrix space is still enumerated to keep the count checkable.
// Succeeds when some realizable assignment turns the end-to-end map
// into the identity.
OracleResult exhaustive_linear_kkk(const KkkNetwork& net);

// Minimum two-level cut value by checking every (omega, theta) pair
// directly against the admission rules.
BoundReport exhaustive_pair_search(const LayeredNetwork& net);

// Conditional entropy of derived variables by brute-force summation.
// base carries the free variables; derive maps each base state to the
// values of the derived variables. target and given name variables
// from either group.
OracleResult exhaustive_entropy(
    const TinyJointDistribution& base, const std::vector<std::string>& derived_names,
    const std::vector<int>& derived_sizes,
    const std::function<std::vector<int>(const std::vector<int>&)>& derive,
    const std::vector<std::string>& target, const std::vector<std::string>& given);

}  // namespace netbound
