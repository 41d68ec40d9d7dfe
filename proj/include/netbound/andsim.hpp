#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netbound/netmodel.hpp"
#include "netbound/rng.hpp"

namespace netbound {

// Monomial direction sets for one network and box bound N. Transmit
// directions run over exponent boxes {0..N-1}^E on the first-hop
// edges; relays see the same monomials with exponents up to N, and
// answer with monomials in the entries of the second hop's inverse.
// Exponent vectors are listed in odometer order, last edge fastest.
struct DirectionTable {
    int K = 0;
    int N = 2;
    std::vector<std::pair<int, int>> edges;  // (source, relay), row-major over the support
    std::vector<mpq_class> gains;            // first-hop gain per edge
    std::vector<mpq_class> inverse_gains;    // matching entry of the inverted second hop

    std::vector<mpq_class> transmit;  // N^E source monomials
    std::vector<mpq_class> received;  // (N+1)^E monomials reaching the relays
    std::vector<mpq_class> relay;     // (N+1)^E inverse-entry monomials

    std::size_t index_in_box(const std::vector<int>& m, int box) const;
    std::vector<int> exponents_at(std::size_t pos, int box) const;
};

// Evaluates every direction exactly. The network must carry rational
// gains whose inverted second hop vanishes exactly where the first hop
// does; monomial value collisions inside either (N+1)-box are refused
// so that coefficients stay recoverable. Boxes are capped at 2^20
// entries and N at 8.
DirectionTable build_directions(const KkkNetwork& net, int N);

// One relay encoding step: coefficients received over the (N+1)-box
// are re-emitted on the inverse-entry monomials, giving each relay's
// transmit value. received is indexed [relay][box position].
std::vector<mpq_class> relay_map(const KkkNetwork& net, int N,
                                 const std::vector<std::vector<mpq_class>>& received);

struct EndToEndReport {
    DirectionTable directions;
    // coefficient[j][mev]: what destination j holds on relay monomial m
    std::vector<std::vector<mpq_class>> coefficient;
    // per_stream[j][m][i]: the part of that coefficient fed by stream i
    std::vector<std::vector<std::vector<mpq_class>>> per_stream;
    bool identity = false;  // own-stream symbols recovered, cross-stream all zero
};

// Runs one exact time step of the alignment scheme: sources mix their
// symbols onto the transmit monomials, relays re-emit on the inverse
// monomials, destinations are decomposed per direction and per stream.
// symbols is indexed [stream][transmit direction].
EndToEndReport end_to_end_check(const KkkNetwork& net, int N,
                                const std::vector<std::vector<long>>& symbols);

// Rational gains on the given support, numerator and denominator
// uniform in [1, 997]. Collisions downstream are handled by sampling
// again with the next seed.
ExactMatrix sample_gains(const SupportPattern& p, Rng& rng);

std::string and_report_to_json_text(const EndToEndReport& r);

}  // namespace netbound
