#pragma once

#include <string>
#include <vector>

#include "netbound/bounds.hpp"
#include "netbound/netmodel.hpp"

namespace netbound {

// One violated requirement. clause is "i" or "ii" with the 1-based
// pair/relay indices, or a short phrase for a hop-level failure with
// both indices zero.
struct FailedClause {
    std::string clause;
    int i = 0;
    int j = 0;

    bool operator==(const FailedClause&) const = default;
};

struct KkkVerdict {
    bool achieves_K = false;
    std::vector<FailedClause> failed;
    int fallback_bound = 0;
    std::string note;
};

// Full sum rate K over a three-layer K-pair network holds exactly when
// both hop matrices are invertible and the zero set of each hop lines
// up with the vanishing cofactor determinants of the other. Checks
// every entry and reports each violation.
KkkVerdict check_exact_conditions(const KkkNetwork& net);

// Over GF(2) the whole criterion collapses to one product: the two
// hops must undo each other, with every relay forwarding unchanged.
KkkVerdict check_gf2_forwarding(const KkkNetwork& net);

// Connectivity-only version of the same entrywise criterion: matchings
// of the reduced patterns stand in for the cofactor determinants, and
// success means K degrees of freedom for almost every gain choice.
KkkVerdict check_generic_conditions(const SupportPattern& support1,
                                    const SupportPattern& support2);

// Zero pattern of the inverse for almost every gain choice: entry
// (i,j) is generically nonzero exactly when dropping row j and column
// i leaves a matched pattern.
SupportPattern generic_inverse_pattern(const SupportPattern& p);

struct DiagonalizableReport {
    bool ok = false;
    SupportPattern inverse1;  // generic zero pattern of the first hop's inverse
    SupportPattern inverse2;
};

// A network is diagonalizable when each hop's generic inverse pattern
// coincides with the other hop's support, both ways.
DiagonalizableReport check_diagonalizable(const SupportPattern& support1,
                                          const SupportPattern& support2);

// Tridiagonal topology: cell i reaches relays and destinations within
// one index step.
KkkNetwork adjacent_cell_network(int K);

// Evaluates the closed-form cut that pins the tridiagonal network to
// ceil(2K/3) degrees of freedom. The second-hop term breakdown carries
// the intermediate set sizes.
BoundReport adjacent_cell_dof(int K);

std::string verdict_to_json_text(const KkkVerdict& v);

}  // namespace netbound
