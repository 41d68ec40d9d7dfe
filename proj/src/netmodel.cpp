#include "netbound/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "netbound/error.hpp"

namespace netbound {

namespace {

using nlohmann::ordered_json;

Error schema(const std::string& msg) { return Error(Error::Kind::SchemaError, msg); }

}  // namespace

bool LayeredNetwork::has_node(const std::string& name) const {
    for (const auto& layer : layers)
        for (const auto& n : layer)
            if (n == name) return true;
    return false;
}

std::pair<int, int> LayeredNetwork::locate(const std::string& name) const {
    for (int j = 0; j < num_layers(); ++j)
        for (int i = 0; i < static_cast<int>(layers[j].size()); ++i)
            if (layers[j][i] == name) return {j, i};
    throw Error(Error::Kind::UnknownNode, "no node named " + name);
}

void LayeredNetwork::validate() const {
    if (num_layers() < 2) throw schema("a layered network needs at least two layers");
    if (K < 1) throw schema("pair count must be positive");
    if (static_cast<int>(sources().size()) != K)
        throw schema("first layer must hold exactly one source per pair");
    if (static_cast<int>(destinations().size()) != K)
        throw schema("last layer must hold exactly one destination per pair");
    for (const auto& layer : layers)
        if (layer.empty()) throw schema("empty layer");

    std::unordered_set<std::string> seen;
    for (const auto& layer : layers)
        for (const auto& n : layer)
            if (!seen.insert(n).second) throw schema("duplicate node name " + n);

    if (static_cast<int>(hops.size()) != num_layers() - 1)
        throw schema("need one hop matrix per consecutive layer pair");
    if (supports.size() != hops.size()) throw schema("need one support pattern per hop");
    for (int j = 0; j < static_cast<int>(hops.size()); ++j) {
        const auto& h = hops[j];
        if (!(h.field == field)) throw schema("hop field disagrees with network field");
        if (h.rows != static_cast<int>(layers[j + 1].size()) ||
            h.cols != static_cast<int>(layers[j].size()))
            throw schema("hop " + std::to_string(j) + " has the wrong shape");
        if (!(SupportPattern::of(h) == supports[j]))
            throw schema("support pattern of hop " + std::to_string(j) +
                         " disagrees with its matrix");
        for (const auto& x : h.e) {
            mpq_class r = field_reduce(field, x);
            if (r != x) throw schema("hop entry not in canonical field form");
        }
    }
}

bool LayeredNetwork::operator==(const LayeredNetwork& o) const {
    return field == o.field && layers == o.layers && hops == o.hops && supports == o.supports &&
           K == o.K && mode == o.mode;
}

KkkNetwork KkkNetwork::from_layered(const LayeredNetwork& net) {
    net.validate();
    if (net.num_layers() != 3) throw schema("relay-row analysis needs exactly three layers");
    if (static_cast<int>(net.layers[1].size()) != net.K)
        throw schema("relay-row analysis needs one relay per pair");
    KkkNetwork k;
    k.K = net.K;
    k.field = net.field;
    k.F1 = net.hops[0];
    k.F2 = net.hops[1];
    k.support1 = net.supports[0];
    k.support2 = net.supports[1];
    k.mode = net.mode;
    return k;
}

LayeredNetwork KkkNetwork::to_layered() const {
    LayeredNetwork net;
    net.field = field;
    net.K = K;
    net.mode = mode;
    std::vector<std::string> s, u, d;
    for (int i = 1; i <= K; ++i) {
        s.push_back("s" + std::to_string(i));
        u.push_back("u" + std::to_string(i));
        d.push_back("d" + std::to_string(i));
    }
    net.layers = {s, u, d};
    net.hops = {F1, F2};
    net.supports = {support1, support2};
    net.validate();
    return net;
}

int WirelineNetwork::node_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (nodes[i] == name) return i;
    throw Error(Error::Kind::UnknownNode, "no node named " + name);
}

void WirelineNetwork::validate() const {
    if (nodes.empty()) throw schema("no nodes");
    if (pairs.empty()) throw schema("no pairs");
    std::unordered_set<std::string> seen;
    for (const auto& n : nodes)
        if (!seen.insert(n).second) throw schema("duplicate node name " + n);

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[i]] = i;
    auto idx = [&](const std::string& n) {
        auto it = index.find(n);
        if (it == index.end()) throw Error(Error::Kind::UnknownNode, "no node named " + n);
        return it->second;
    };

    std::vector<int> indeg(nodes.size(), 0), outdeg(nodes.size(), 0);
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& [u, v] : edges) {
        const int a = idx(u), b = idx(v);
        if (a == b) throw schema("self-loop at " + u);
        adj[a].push_back(b);
        ++outdeg[a];
        ++indeg[b];
    }

    // Kahn's algorithm; leftover nodes mean a directed cycle
    std::vector<int> deg = indeg;
    std::queue<int> q;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (deg[i] == 0) q.push(i);
    int visited = 0;
    while (!q.empty()) {
        const int a = q.front();
        q.pop();
        ++visited;
        for (int b : adj[a])
            if (--deg[b] == 0) q.push(b);
    }
    if (visited != static_cast<int>(nodes.size())) throw schema("edge set contains a cycle");

    for (const auto& [s, d] : pairs) {
        if (s == d) throw schema("pair with identical endpoints " + s);
        if (indeg[idx(s)] != 0) throw schema("source " + s + " has incoming edges");
        if (outdeg[idx(d)] != 0) throw schema("destination " + d + " has outgoing edges");
    }
}

bool WirelineNetwork::operator==(const WirelineNetwork& o) const {
    return nodes == o.nodes && edges == o.edges && pairs == o.pairs;
}

CutCheck validate_cut_pair(const LayeredNetwork& net, const CutPair& c) {
    for (const auto& n : c.omega) net.locate(n);
    for (const auto& n : c.theta) net.locate(n);

    std::unordered_set<std::string> omega(c.omega.begin(), c.omega.end());
    std::unordered_set<std::string> theta(c.theta.begin(), c.theta.end());

    CutCheck out;
    for (const auto& s : net.sources())
        if (!omega.count(s)) out.violations.push_back("source " + s + " must be in omega");
    for (const auto& n : theta) {
        if (!omega.count(n)) out.violations.push_back("theta member " + n + " is not in omega");
    }
    for (const auto& d : net.destinations())
        if (theta.count(d)) out.violations.push_back("destination " + d + " may not be in theta");
    for (int i = 0; i < net.K; ++i) {
        const std::string& s = net.sources()[i];
        const std::string& d = net.destinations()[i];
        if (omega.count(d) && !theta.count(s))
            out.violations.push_back("destination " + d + " is in omega but source " + s +
                                     " is not in theta");
        if (theta.count(s) && !omega.count(d))
            out.violations.push_back("source " + s + " is in theta but destination " + d +
                                     " is not in omega");
    }
    out.ok = out.violations.empty();
    return out;
}

CutCheck validate_cut_chain(const LayeredNetwork& net, const CutChain& chain) {
    CutCheck out;
    if (chain.cuts.empty()) {
        out.violations.push_back("chain has no cuts");
        return out;
    }
    for (const auto& cut : chain.cuts)
        for (const auto& n : cut) net.locate(n);

    std::vector<std::unordered_set<std::string>> cuts;
    for (const auto& cut : chain.cuts) cuts.emplace_back(cut.begin(), cut.end());
    const int ell = static_cast<int>(cuts.size());

    for (int j = 0; j + 1 < ell; ++j)
        for (const auto& n : cuts[j + 1])
            if (!cuts[j].count(n))
                out.violations.push_back("cut " + std::to_string(j + 2) + " member " + n +
                                         " missing from cut " + std::to_string(j + 1));

    // pair coupling with the whole node set before the chain and the
    // empty set after it
    auto in_cut = [&](int j, const std::string& n) {
        if (j <= 0) return true;
        if (j > ell) return false;
        return cuts[j - 1].count(n) > 0;
    };
    for (int j = 0; j <= ell; ++j) {
        for (int i = 0; i < net.K; ++i) {
            const std::string& s = net.sources()[i];
            const std::string& d = net.destinations()[i];
            const bool dj = in_cut(j, d);
            const bool sj = in_cut(j + 1, s);
            if (dj && !sj)
                out.violations.push_back(
                    j == 0 ? "source " + s + " must be in cut 1"
                           : "destination " + d + " is in cut " + std::to_string(j) +
                                 " but source " + s + " is not in cut " + std::to_string(j + 1));
            if (sj && !dj)
                out.violations.push_back("source " + s + " is in cut " + std::to_string(j + 1) +
                                         " but destination " + d + " is not in cut " +
                                         std::to_string(j));
        }
    }
    out.ok = out.violations.empty();
    return out;
}

LayeredNetwork concatenate(const LayeredNetwork& net, int ell) {
    if (ell < 1) throw Error(Error::Kind::InvalidInput, "copy count must be at least 1");
    net.validate();
    const int r = net.num_layers();

    LayeredNetwork out;
    out.field = net.field;
    out.K = net.K;
    out.mode = net.mode;

    auto tagged = [](const std::vector<std::string>& names, int copy) {
        std::vector<std::string> v;
        for (const auto& n : names) v.push_back(n + "@" + std::to_string(copy));
        return v;
    };

    for (int g = 0; g < ell * (r - 1); ++g) {
        const int copy = g / (r - 1) + 1;
        const int t = g % (r - 1);
        // a glue layer is the next copy's source layer and is named for it
        out.layers.push_back(t == 0 ? tagged(net.sources(), copy) : tagged(net.layers[t], copy));
        out.hops.push_back(net.hops[t]);
        out.supports.push_back(net.supports[t]);
    }
    out.layers.push_back(tagged(net.destinations(), ell));

    out.validate();
    return out;
}

WirelineNetwork concatenate(const WirelineNetwork& net, int ell) {
    if (ell < 1) throw Error(Error::Kind::InvalidInput, "copy count must be at least 1");
    net.validate();

    std::unordered_map<std::string, std::string> dest_to_source;
    for (const auto& [s, d] : net.pairs) dest_to_source[d] = s;

    auto renamed = [&](const std::string& n, int copy) {
        auto it = dest_to_source.find(n);
        if (it != dest_to_source.end() && copy < ell)
            return it->second + "@" + std::to_string(copy + 1);
        return n + "@" + std::to_string(copy);
    };

    WirelineNetwork out;
    std::unordered_set<std::string> seen;
    for (int copy = 1; copy <= ell; ++copy)
        for (const auto& n : net.nodes) {
            std::string name = renamed(n, copy);
            if (seen.insert(name).second) out.nodes.push_back(std::move(name));
        }
    for (int copy = 1; copy <= ell; ++copy)
        for (const auto& [u, v] : net.edges)
            out.edges.emplace_back(renamed(u, copy), renamed(v, copy));
    for (const auto& [s, d] : net.pairs)
        out.pairs.emplace_back(s + "@1", d + "@" + std::to_string(ell));

    out.validate();
    return out;
}

std::size_t TinyJointDistribution::num_states() const {
    std::size_t n = 1;
    for (int s : sizes) n *= static_cast<std::size_t>(s);
    return n;
}

std::size_t TinyJointDistribution::state_index(const std::vector<int>& values) const {
    if (values.size() != sizes.size())
        throw Error(Error::Kind::InvalidInput, "state has the wrong number of coordinates");
    std::size_t idx = 0;
    for (std::size_t v = 0; v < sizes.size(); ++v) {
        if (values[v] < 0 || values[v] >= sizes[v])
            throw Error(Error::Kind::IndexOutOfRange, "state coordinate out of range");
        idx = idx * static_cast<std::size_t>(sizes[v]) + static_cast<std::size_t>(values[v]);
    }
    return idx;
}

TinyJointDistribution TinyJointDistribution::uniform(std::vector<std::string> names,
                                                     std::vector<int> sizes) {
    TinyJointDistribution d;
    d.names = std::move(names);
    d.sizes = std::move(sizes);
    const std::size_t n = d.num_states();
    d.p.assign(n, mpq_class(1, static_cast<unsigned long>(n)));
    d.validate();
    return d;
}

TinyJointDistribution TinyJointDistribution::from_weights(std::vector<std::string> names,
                                                          std::vector<int> sizes,
                                                          std::vector<mpq_class> weights) {
    TinyJointDistribution d;
    d.names = std::move(names);
    d.sizes = std::move(sizes);
    mpq_class total = 0;
    for (const auto& w : weights) {
        if (w < 0) throw Error(Error::Kind::InvalidInput, "negative weight");
        total += w;
    }
    if (total == 0) throw Error(Error::Kind::InvalidInput, "weights sum to zero");
    for (auto& w : weights) {
        w /= total;
        w.canonicalize();
    }
    d.p = std::move(weights);
    d.validate();
    return d;
}

void TinyJointDistribution::validate() const {
    if (names.size() != sizes.size())
        throw Error(Error::Kind::InvalidInput, "one name per variable required");
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw Error(Error::Kind::InvalidInput, "duplicate variable name " + n);
    for (int s : sizes)
        if (s < 1) throw Error(Error::Kind::InvalidInput, "alphabet size must be positive");
    if (p.size() != num_states())
        throw Error(Error::Kind::InvalidInput, "probability table has the wrong length");
    mpq_class total = 0;
    for (const auto& x : p) {
        if (x < 0) throw Error(Error::Kind::InvalidInput, "negative probability");
        total += x;
    }
    if (total != 1) throw Error(Error::Kind::InvalidInput, "probabilities must sum to one");
}

namespace {

mpq_class entry_from_json(const ordered_json& v) {
    if (v.is_number_integer()) return mpq_class(static_cast<long>(v.get<std::int64_t>()));
    if (v.is_number_unsigned()) return mpq_class(static_cast<unsigned long>(v.get<std::uint64_t>()));
    if (v.is_string()) {
        mpq_class q;
        if (q.set_str(v.get<std::string>(), 10) != 0)
            throw schema("matrix entry " + v.get<std::string>() + " is not a rational");
        q.canonicalize();
        if (q.get_den() < 0) throw schema("matrix entry with nonpositive denominator");
        return q;
    }
    throw schema("matrix entries must be integers or \"a/b\" strings");
}

ordered_json entry_to_json(const mpq_class& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p())
        return ordered_json(static_cast<std::int64_t>(q.get_num().get_si()));
    return ordered_json(q.get_str());
}

FieldSpec field_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("type")) throw schema("field needs a type");
    const std::string t = j.at("type").get<std::string>();
    if (t == "rational") return FieldSpec::rational();
    if (t == "prime") {
        if (!j.contains("p")) throw schema("prime field needs p");
        try {
            return FieldSpec::prime(j.at("p").get<std::uint64_t>());
        } catch (const Error&) {
            throw schema("field modulus is not prime");
        }
    }
    throw schema("unknown field type " + t);
}

ordered_json field_to_json(const FieldSpec& f) {
    ordered_json j;
    if (f.kind == FieldSpec::Kind::Prime) {
        j["type"] = "prime";
        j["p"] = f.p;
    } else {
        j["type"] = "rational";
    }
    return j;
}

ExactMatrix matrix_from_json(const ordered_json& rows, const FieldSpec& f) {
    if (!rows.is_array() || rows.empty()) throw schema("matrix must be a nonempty row list");
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rows.at(0).size());
    ExactMatrix m = ExactMatrix::zero(f, nr, nc);
    for (int r = 0; r < nr; ++r) {
        const auto& row = rows.at(r);
        if (!row.is_array() || static_cast<int>(row.size()) != nc)
            throw schema("ragged matrix rows");
        for (int c = 0; c < nc; ++c) {
            try {
                m.at(r, c) = field_reduce(f, entry_from_json(row.at(c)));
            } catch (const Error& e) {
                if (e.kind == Error::Kind::SchemaError) throw;
                throw schema(std::string("bad matrix entry: ") + e.what());
            }
        }
    }
    return m;
}

ordered_json matrix_to_json(const ExactMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < m.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(entry_to_json(m.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

SupportPattern support_from_json(const ordered_json& rows) {
    if (!rows.is_array() || rows.empty()) throw schema("support must be a nonempty row list");
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rows.at(0).size());
    SupportPattern p = SupportPattern::zero(nr, nc);
    for (int r = 0; r < nr; ++r) {
        const auto& row = rows.at(r);
        if (!row.is_array() || static_cast<int>(row.size()) != nc)
            throw schema("ragged support rows");
        for (int c = 0; c < nc; ++c) {
            const int v = row.at(c).get<int>();
            if (v != 0 && v != 1) throw schema("support entries must be 0 or 1");
            p.at(r, c) = static_cast<std::uint8_t>(v);
        }
    }
    return p;
}

ordered_json support_to_json(const SupportPattern& p) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < p.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < p.cols; ++c) row.push_back(static_cast<int>(p.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

// in generic mode the support patterns are authoritative and the
// matrices are their 0/1 shadow; in explicit mode it is the other way
// around
ExactMatrix shadow_matrix(const SupportPattern& p, const FieldSpec& f) {
    ExactMatrix m = ExactMatrix::zero(f, p.rows, p.cols);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            if (p.at(r, c)) m.at(r, c) = 1;
    return m;
}

LayeredNetwork layered_from_json(const ordered_json& j) {
    LayeredNetwork net;
    for (const char* key : {"field", "layers", "pairs", "mode"})
        if (!j.contains(key)) throw schema(std::string("layered network needs \"") + key + "\"");
    net.field = field_from_json(j.at("field"));
    net.layers = j.at("layers").get<std::vector<std::vector<std::string>>>();
    net.K = j.at("pairs").get<int>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "explicit")
        net.mode = LayeredNetwork::Mode::Explicit;
    else if (mode == "generic")
        net.mode = LayeredNetwork::Mode::Generic;
    else
        throw schema("mode must be \"explicit\" or \"generic\"");

    if (net.mode == LayeredNetwork::Mode::Explicit) {
        if (!j.contains("hops")) throw schema("explicit networks need \"hops\"");
        for (const auto& h : j.at("hops")) net.hops.push_back(matrix_from_json(h, net.field));
        for (const auto& h : net.hops) net.supports.push_back(SupportPattern::of(h));
        if (j.contains("supports")) {
            std::vector<SupportPattern> given;
            for (const auto& s : j.at("supports")) given.push_back(support_from_json(s));
            if (given != net.supports)
                throw schema("given supports disagree with the hop matrices");
        }
    } else {
        if (!j.contains("supports")) throw schema("generic networks need \"supports\"");
        for (const auto& s : j.at("supports")) net.supports.push_back(support_from_json(s));
        for (const auto& s : net.supports) net.hops.push_back(shadow_matrix(s, net.field));
    }
    net.validate();
    return net;
}

WirelineNetwork wireline_from_json(const ordered_json& j) {
    WirelineNetwork net;
    for (const char* key : {"nodes", "edges", "pairs"})
        if (!j.contains(key)) throw schema(std::string("wireline network needs \"") + key + "\"");
    net.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw schema("edges must be [from, to] pairs");
        net.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2)
            throw schema("pairs must be [source, destination] pairs");
        net.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    net.validate();
    return net;
}

}  // namespace

AnyNetwork network_from_json_text(const std::string& text, const std::string& origin) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Error::Kind::ParseError, origin + ": " + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("kind")) throw schema("top level needs \"kind\"");
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "layered") return layered_from_json(j);
        if (kind == "wireline") return wireline_from_json(j);
        throw schema("kind must be \"layered\" or \"wireline\"");
    } catch (const ordered_json::exception& e) {
        throw Error(Error::Kind::SchemaError, origin + ": " + e.what());
    } catch (const Error& e) {
        if (e.kind == Error::Kind::SchemaError)
            throw Error(Error::Kind::SchemaError, origin + ": " + e.what());
        throw;
    }
}

std::string network_to_json_text(const AnyNetwork& net) {
    ordered_json j;
    if (const auto* lay = std::get_if<LayeredNetwork>(&net)) {
        lay->validate();
        j["kind"] = "layered";
        j["field"] = field_to_json(lay->field);
        j["layers"] = lay->layers;
        if (lay->mode == LayeredNetwork::Mode::Explicit) {
            ordered_json hops = ordered_json::array();
            for (const auto& h : lay->hops) hops.push_back(matrix_to_json(h));
            j["hops"] = hops;
        } else {
            ordered_json sup = ordered_json::array();
            for (const auto& s : lay->supports) sup.push_back(support_to_json(s));
            j["supports"] = sup;
        }
        j["pairs"] = lay->K;
        j["mode"] = lay->mode == LayeredNetwork::Mode::Explicit ? "explicit" : "generic";
    } else {
        const auto& w = std::get<WirelineNetwork>(net);
        w.validate();
        j["kind"] = "wireline";
        j["nodes"] = w.nodes;
        ordered_json edges = ordered_json::array();
        for (const auto& [u, v] : w.edges) edges.push_back({u, v});
        j["edges"] = edges;
        ordered_json pairs = ordered_json::array();
        for (const auto& [s, d] : w.pairs) pairs.push_back({s, d});
        j["pairs"] = pairs;
    }
    return j.dump(2) + "\n";
}

AnyNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::ParseError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return network_from_json_text(buf.str(), path);
}

void save_network(const AnyNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Error::Kind::ParseError, "cannot open " + path + " for writing");
    out << network_to_json_text(net);
}

}  // namespace netbound
