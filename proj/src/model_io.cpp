#include "bench500/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bench500 {

using nlohmann::json;

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw std::runtime_error("model schema violation at " + path + ": " + msg);
}

}  // namespace

std::string base64_encode(std::span<const uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        uint32_t v = (uint32_t(bytes[i]) << 16) | (uint32_t(bytes[i + 1]) << 8) | bytes[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
    }
    if (i + 1 == bytes.size()) {
        uint32_t v = uint32_t(bytes[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (i + 2 == bytes.size()) {
        uint32_t v = (uint32_t(bytes[i]) << 16) | (uint32_t(bytes[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw std::runtime_error("base64: length not a multiple of 4");
    std::vector<uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (size_t i = 0; i < text.size(); i += 4) {
        int pad = 0;
        uint32_t v = 0;
        for (size_t k = 0; k < 4; ++k) {
            char c = text[i + k];
            if (c == '=') {
                if (i + 4 != text.size() || k < 2) throw std::runtime_error("base64: bad padding");
                ++pad;
                v <<= 6;
                continue;
            }
            int d = value_of(c);
            if (d < 0 || pad > 0) throw std::runtime_error("base64: invalid character");
            v = (v << 6) | uint32_t(d);
        }
        out.push_back(uint8_t((v >> 16) & 0xFF));
        if (pad < 2) out.push_back(uint8_t((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(uint8_t(v & 0xFF));
    }
    return out;
}

namespace {

json attr_to_json(const AttrValue& v) {
    return std::visit([](const auto& x) { return json(x); }, v);
}

AttrValue attr_from_json(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        std::vector<int64_t> v;
        for (const auto& e : j) {
            if (!e.is_number_integer()) schema_error(path, "attribute lists must hold integers");
            v.push_back(e.get<int64_t>());
        }
        return v;
    }
    schema_error(path, "malformed attribute value");
}

NodeSpec node_from_json(const json& j, const std::string& path) {
    for (const char* key : {"name", "op", "inputs", "outputs"})
        if (!j.contains(key)) schema_error(path, std::string("missing '") + key + "'");
    NodeSpec n;
    n.name = j.at("name").get<std::string>();
    n.op = j.at("op").get<std::string>();
    for (const auto& e : j.at("inputs")) n.inputs.push_back(e.get<std::string>());
    for (const auto& e : j.at("outputs")) n.outputs.push_back(e.get<std::string>());
    if (j.contains("attrs")) {
        if (!j.at("attrs").is_object()) schema_error(path + "/attrs", "must be an object");
        for (const auto& [k, v] : j.at("attrs").items())
            n.attrs.set(k, attr_from_json(v, path + "/attrs/" + k));
    }
    return n;
}

class GraphBuildingVisitor final : public ModelVisitor {
  public:
    NetworkGraph take() { return std::move(g_); }

    void visit_initializer(const std::string& name, Tensor value) override {
        g_.feed(name, std::move(value));
    }
    void visit_input(const std::string& name) override { g_.add_input(name); }
    void visit_output(const std::string& name) override { g_.add_output(name); }
    void visit_gradient_pair(const std::string& p, const std::string& gr) override {
        g_.add_gradient_pair(p, gr);
    }

  protected:
    void visit_default(const NodeSpec& n) override { g_.add_node(n); }

  private:
    NetworkGraph g_;
};

}  // namespace

void walk_model(const std::string& bytes, ModelVisitor& visitor) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("model parse error at byte " + std::to_string(e.byte) + ": " +
                                 e.what());
    }
    if (!doc.contains("version") || !doc.at("version").is_number_integer())
        schema_error("/version", "missing integer version");
    if (doc.at("version").get<int>() != kModelSchemaVersion)
        schema_error("/version", "unsupported version " + doc.at("version").dump());
    if (!doc.contains("graph") || !doc.at("graph").is_object())
        schema_error("/graph", "missing graph object");
    const json& g = doc.at("graph");

    if (g.contains("inputs"))
        for (const auto& e : g.at("inputs")) visitor.visit_input(e.get<std::string>());

    if (g.contains("initializers")) {
        size_t idx = 0;
        for (const auto& init : g.at("initializers")) {
            const std::string path = "/graph/initializers/" + std::to_string(idx++);
            for (const char* key : {"name", "dtype", "shape", "data"})
                if (!init.contains(key)) schema_error(path, std::string("missing '") + key + "'");
            TensorDesc desc;
            desc.dtype = dtype_from_name(init.at("dtype").get<std::string>());
            for (const auto& e : init.at("shape")) desc.shape.push_back(e.get<int64_t>());
            std::vector<uint8_t> raw;
            try {
                raw = base64_decode(init.at("data").get<std::string>());
            } catch (const std::exception& e) {
                schema_error(path + "/data", e.what());
            }
            Tensor t;
            try {
                t = Tensor::from_bytes(desc, raw);
            } catch (const std::exception& e) {
                schema_error(path, e.what());
            }
            visitor.visit_initializer(init.at("name").get<std::string>(), std::move(t));
        }
    }

    if (g.contains("nodes")) {
        size_t idx = 0;
        for (const auto& jn : g.at("nodes")) {
            const std::string path = "/graph/nodes/" + std::to_string(idx++);
            NodeSpec n = node_from_json(jn, path);
            if (n.op == "Conv") visitor.visit_conv(n);
            else if (n.op == "Gemm") visitor.visit_gemm(n);
            else if (n.op == "Relu") visitor.visit_relu(n);
            else if (n.op == "MaxPool") visitor.visit_maxpool(n);
            else if (n.op == "x-MedianPool") visitor.visit_medianpool(n);
            else if (n.op == "Softmax") visitor.visit_softmax(n);
            else if (n.op == "x-CrossEntropyLoss") visitor.visit_crossentropyloss(n);
            else if (n.op == "Add") visitor.visit_add(n);
            else if (n.op == "Sub") visitor.visit_sub(n);
            else if (n.op == "Mul") visitor.visit_mul(n);
            else if (n.op == "Reshape") visitor.visit_reshape(n);
            else if (n.op == "Split") visitor.visit_split(n);
            else if (n.op == "Concat") visitor.visit_concat(n);
            else
                throw std::runtime_error("unknown op '" + n.op + "' at " + path);
        }
    }

    if (g.contains("outputs"))
        for (const auto& e : g.at("outputs")) visitor.visit_output(e.get<std::string>());

    if (g.contains("gradient_pairs"))
        for (const auto& [k, v] : g.at("gradient_pairs").items())
            visitor.visit_gradient_pair(k, v.get<std::string>());
}

NetworkGraph load_model(const std::string& bytes) {
    GraphBuildingVisitor v;
    walk_model(bytes, v);
    NetworkGraph g = v.take();
    g.validate();
    return g;
}

NetworkGraph load_model_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_model(ss.str());
}

std::string save_model(const NetworkGraph& g) {
    json nodes = json::array();
    for (const NodeSpec& n : g.nodes()) {
        json attrs = json::object();
        for (const auto& [k, v] : n.attrs.values) attrs[k] = attr_to_json(v);
        nodes.push_back({{"name", n.name},
                         {"op", n.op},
                         {"inputs", n.inputs},
                         {"outputs", n.outputs},
                         {"attrs", attrs}});
    }
    json inits = json::array();
    for (const auto& [name, t] : g.initializers()) {
        auto bytes = t.to_bytes();
        inits.push_back({{"name", name},
                         {"dtype", dtype_name(t.dtype())},
                         {"shape", t.shape()},
                         {"data", base64_encode(bytes)}});
    }
    json doc = {{"version", kModelSchemaVersion},
                {"graph",
                 {{"nodes", nodes},
                  {"initializers", inits},
                  {"inputs", g.inputs()},
                  {"outputs", g.outputs()},
                  {"gradient_pairs", g.gradient_pairs()}}}};
    return doc.dump();
}

void save_model_file(const NetworkGraph& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << save_model(g);
}

}  // namespace bench500
