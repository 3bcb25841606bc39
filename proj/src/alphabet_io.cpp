#include "circlelab/alphabet_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace circlelab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw std::invalid_argument("alphabet config: unknown key '" + it.key() + "'");
    }
}

PrimitiveMap parse_generator(const json& g, const Tolerances& tol) {
    if (!g.is_object()) throw std::invalid_argument("alphabet config: generator must be an object");
    const std::string kind = g.at("kind").get<std::string>();
    if (kind == "rotation") {
        reject_unknown_keys(g, {"kind", "angle"});
        return PrimitiveMap::rotation(g.at("angle").get<double>());
    }
    if (kind == "moebius") {
        reject_unknown_keys(g, {"kind", "matrix"});
        const auto& m = g.at("matrix");
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 ||
            !m[1].is_array() || m[1].size() != 2)
            throw std::invalid_argument("alphabet config: moebius matrix must be 2x2");
        return PrimitiveMap::moebius(m[0][0].get<double>(), m[0][1].get<double>(),
                                     m[1][0].get<double>(), m[1][1].get<double>(), tol);
    }
    if (kind == "trig") {
        reject_unknown_keys(g, {"kind", "offset", "amplitude"});
        return PrimitiveMap::trig(g.at("offset").get<double>(), g.at("amplitude").get<double>());
    }
    throw std::invalid_argument("alphabet config: unknown kind '" + kind + "'");
}

} // namespace

IndexedAlphabet load_alphabet(const std::string& json_text, const Tolerances& tol) {
    json root = json::parse(json_text);
    if (!root.is_object()) throw std::invalid_argument("alphabet config: root must be an object");
    reject_unknown_keys(root, {"generators"});
    Alphabet gens;
    for (const auto& g : root.at("generators")) gens.push_back(parse_generator(g, tol));
    if (gens.empty()) throw std::invalid_argument("alphabet config: no generators");
    return IndexedAlphabet(std::move(gens));
}

IndexedAlphabet load_alphabet_file(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("alphabet config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_alphabet(buf.str(), tol);
}

std::string save_alphabet(const IndexedAlphabet& alphabet) {
    json root;
    root["generators"] = json::array();
    for (const PrimitiveMap& p : alphabet.gens) {
        json g;
        switch (p.kind) {
        case PrimitiveMap::Kind::Rotation:
            g["kind"] = "rotation";
            g["angle"] = p.angle;
            break;
        case PrimitiveMap::Kind::Moebius:
            g["kind"] = "moebius";
            g["matrix"] = {{p.m00, p.m01}, {p.m10, p.m11}};
            break;
        case PrimitiveMap::Kind::TrigPerturb:
            g["kind"] = "trig";
            g["offset"] = p.offset;
            g["amplitude"] = p.amplitude;
            break;
        }
        root["generators"].push_back(g);
    }
    return root.dump(2);
}

} // namespace circlelab
