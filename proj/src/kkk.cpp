#include "netbound/kkk.hpp"

#include <stdexcept>

#include "json.hpp"
#include "netbound/error.hpp"

using nlohmann::ordered_json;

namespace netbound {

namespace {

void finish(KkkVerdict& v, int K) {
    v.achieves_K = v.failed.empty();
    v.fallback_bound = v.achieves_K ? K : K - 1;
}

bool in_band_a(int i) {
    const int m = i % 6;
    return m == 0 || m == 1 || m == 2 || m == 5;
}

bool in_band_b(int i) {
    const int m = i % 6;
    return m == 0 || m == 1;
}

}  // namespace

KkkVerdict check_exact_conditions(const KkkNetwork& net) {
    if (net.mode != LayeredNetwork::Mode::Explicit)
        throw Error(Error::Kind::InvalidInput, "exact conditions need channel gains, not just connectivity");
    const int K = net.K;
    KkkVerdict v;

    const bool first_ok = determinant(net.F1) != 0;
    const bool second_ok = determinant(net.F2) != 0;
    if (!first_ok) v.failed.push_back({"first hop singular"});
    if (!second_ok) v.failed.push_back({"second hop singular"});
    if (first_ok && second_ok) {
        for (int i = 1; i <= K; ++i)
            for (int j = 1; j <= K; ++j) {
                // source i reaches relay j exactly when the second hop
                // still has full weight without destination i and relay j
                const bool edge1 = net.F1.at(j - 1, i - 1) != 0;
                const bool minor2 = determinant(cofactor_submatrix(net.F2, i - 1, j - 1)) != 0;
                if (edge1 != minor2) v.failed.push_back({"i", i, j});
                const bool edge2 = net.F2.at(i - 1, j - 1) != 0;
                const bool minor1 = determinant(cofactor_submatrix(net.F1, j - 1, i - 1)) != 0;
                if (edge2 != minor1) v.failed.push_back({"ii", i, j});
            }
    }
    finish(v, K);
    return v;
}

KkkVerdict check_gf2_forwarding(const KkkNetwork& net) {
    if (net.field.kind != FieldSpec::Kind::Prime || net.field.p != 2)
        throw Error(Error::Kind::WrongField, "the forwarding criterion is a GF(2) statement");
    if (net.mode != LayeredNetwork::Mode::Explicit)
        throw Error(Error::Kind::InvalidInput, "forwarding check needs channel gains");
    const int K = net.K;
    KkkVerdict v;

    const ExactMatrix product = multiply(net.F2, net.F1);
    const ExactMatrix ident = ExactMatrix::identity(net.field, K);
    for (int i = 1; i <= K; ++i)
        for (int j = 1; j <= K; ++j)
            if (product.at(i - 1, j - 1) != ident.at(i - 1, j - 1))
                v.failed.push_back({"product", i, j});
    finish(v, K);
    if (v.achieves_K) v.note = "each relay forwards its received signal unchanged";
    return v;
}

KkkVerdict check_generic_conditions(const SupportPattern& support1,
                                    const SupportPattern& support2) {
    if (support1.rows != support1.cols || support2.rows != support2.cols ||
        support1.rows != support2.rows)
        throw Error(Error::Kind::InvalidInput, "both patterns must be square and equally sized");
    const int K = support1.rows;
    KkkVerdict v;

    const bool first_ok = has_perfect_matching(support1);
    const bool second_ok = has_perfect_matching(support2);
    if (!first_ok) v.failed.push_back({"first hop unmatched"});
    if (!second_ok) v.failed.push_back({"second hop unmatched"});
    if (first_ok && second_ok) {
        for (int i = 1; i <= K; ++i)
            for (int j = 1; j <= K; ++j) {
                const bool edge1 = support1.at(j - 1, i - 1) != 0;
                const bool minor2 = has_perfect_matching(drop_row_col(support2, i - 1, j - 1));
                if (edge1 != minor2) v.failed.push_back({"i", i, j});
                const bool edge2 = support2.at(i - 1, j - 1) != 0;
                const bool minor1 = has_perfect_matching(drop_row_col(support1, j - 1, i - 1));
                if (edge2 != minor1) v.failed.push_back({"ii", i, j});
            }
    }
    finish(v, K);
    if (v.achieves_K) v.note = "K degrees of freedom for almost every gain choice";
    return v;
}

SupportPattern generic_inverse_pattern(const SupportPattern& p) {
    if (p.rows != p.cols)
        throw Error(Error::Kind::InvalidInput, "only square patterns have an inverse pattern");
    if (!has_perfect_matching(p))
        throw Error(Error::Kind::SingularPattern, "pattern is singular for every gain choice");
    SupportPattern inv = SupportPattern::zero(p.rows, p.cols);
    for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < p.cols; ++j)
            inv.at(i, j) = has_perfect_matching(drop_row_col(p, j, i)) ? 1 : 0;
    return inv;
}

DiagonalizableReport check_diagonalizable(const SupportPattern& support1,
                                          const SupportPattern& support2) {
    if (support1.rows != support1.cols || support2.rows != support2.cols ||
        support1.rows != support2.rows)
        throw Error(Error::Kind::InvalidInput, "both patterns must be square and equally sized");
    DiagonalizableReport rep;
    rep.inverse1 = generic_inverse_pattern(support1);
    rep.inverse2 = generic_inverse_pattern(support2);
    rep.ok = rep.inverse1 == support2 && rep.inverse2 == support1;
    return rep;
}

KkkNetwork adjacent_cell_network(int K) {
    if (K < 1) throw Error(Error::Kind::InvalidInput, "need at least one cell");
    KkkNetwork net;
    net.K = K;
    net.field = FieldSpec::rational();
    net.mode = LayeredNetwork::Mode::Generic;
    SupportPattern band = SupportPattern::zero(K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c)
            if (r - c <= 1 && c - r <= 1) band.at(r, c) = 1;
    net.support1 = band;
    net.support2 = band;
    ExactMatrix shadow = ExactMatrix::zero(net.field, K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c)
            if (band.at(r, c)) shadow.at(r, c) = 1;
    net.F1 = shadow;
    net.F2 = shadow;
    return net;
}

BoundReport adjacent_cell_dof(int K) {
    const LayeredNetwork net = adjacent_cell_network(K).to_layered();

    // two interleaved index bands drive the cut: destinations keep
    // band B, relays keep band A, and band B sources join the inner set
    CutPair cut;
    int size_a = 0, size_b = 0;
    for (int i = 1; i <= K; ++i) {
        cut.omega.push_back("s" + std::to_string(i));
        if (in_band_b(i)) cut.theta.push_back("s" + std::to_string(i));
    }
    for (int i = 1; i <= K; ++i) {
        cut.omega.push_back("u" + std::to_string(i));
        if (in_band_a(i)) {
            cut.theta.push_back("u" + std::to_string(i));
            ++size_a;
        }
    }
    for (int i = 1; i <= K; ++i) {
        if (in_band_b(i)) {
            cut.omega.push_back("d" + std::to_string(i));
            ++size_b;
        }
    }

    BoundReport rep = eval_pair_bound(net, cut);
    const int expected = (2 * K + 2) / 3;
    const int cross = (2 * (K - 1) + 2) / 3;
    if (size_a + (K - size_b) != K + (K + 1) / 3)
        throw std::logic_error("band sizes drifted from the closed form");
    if (rep.terms.size() != 2 || rep.terms[1].rank_omega != K - size_b ||
        rep.terms[1].rank_theta != size_a || rep.terms[1].rank_cross != cross)
        throw std::logic_error("cut breakdown drifted from the closed form");
    if (rep.value != expected)
        throw std::logic_error("tridiagonal cut value drifted from the closed form");
    return rep;
}

std::string verdict_to_json_text(const KkkVerdict& v) {
    ordered_json j;
    j["achieves_K"] = v.achieves_K;
    ordered_json failed = ordered_json::array();
    for (const auto& f : v.failed) {
        ordered_json jf;
        jf["clause"] = f.clause;
        jf["i"] = f.i;
        jf["j"] = f.j;
        failed.push_back(jf);
    }
    j["failed"] = failed;
    j["fallback_bound"] = v.fallback_bound;
    if (!v.note.empty()) j["note"] = v.note;
    return j.dump(2) + "\n";
}

}  // namespace netbound
