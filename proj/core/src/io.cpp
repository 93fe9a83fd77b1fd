#include "spectral/io.hpp"

#include <fstream>
#include <sstream>

namespace spectral {
namespace io {

namespace {

const char* kDigits = "0123456789abc";

int digit_value(char c, int line) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'c') return 10 + (c - 'a');
    throw ParseError(std::string("bad digit '") + c + "'", line);
}

struct LineReader {
    std::istream& in;
    int line = 0;

    std::string next() {
        std::string s;
        while (std::getline(in, s)) {
            ++line;
            if (!s.empty() && s.back() == '\r') s.pop_back();
            if (!s.empty()) return s;
        }
        throw ParseError("unexpected end of input", line);
    }
    bool next_optional(std::string& s) {
        while (std::getline(in, s)) {
            ++line;
            if (!s.empty() && s.back() == '\r') s.pop_back();
            if (!s.empty()) return true;
        }
        return false;
    }
};

// "BF p=2 n=4" style headers.
struct Header {
    std::string tag;
    int p;
    int n;
};

Header parse_header(const std::string& s, int line) {
    std::istringstream iss(s);
    Header h;
    std::string ptok, ntok;
    if (!(iss >> h.tag >> ptok >> ntok) || ptok.rfind("p=", 0) != 0 || ntok.rfind("n=", 0) != 0)
        throw ParseError("expected header '<TAG> p=<p> n=<n>', got '" + s + "'", line);
    try {
        h.p = std::stoi(ptok.substr(2));
        h.n = std::stoi(ntok.substr(2));
    } catch (const std::exception&) {
        throw ParseError("bad p/n in header '" + s + "'", line);
    }
    return h;
}

int parse_pm1(const std::string& tok, int line) {
    if (tok == "+1") return 1;
    if (tok == "-1") return -1;
    throw ParseError("expected '+1' or '-1', got '" + tok + "'", line);
}

}  // namespace

std::string mask_to_string(Mask m, int n) {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
        if (m & (Mask(1) << i)) s[n - 1 - i] = '1';
    return s;
}

Mask mask_from_string(const std::string& s, int line) {
    Mask m = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        int d = digit_value(s[j], line);
        if (d > 1) throw ParseError("binary mask digit out of range", line);
        if (d) m |= Mask(1) << (s.size() - 1 - j);
    }
    return m;
}

std::string code_to_string(zp::Code c, int n, int p) {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i) s[n - 1 - i] = kDigits[zp::digit(c, i, p)];
    return s;
}

namespace {
zp::Code code_from_string(const std::string& s, int p, int line) {
    zp::Code c = 0;
    zp::Code stride = 1;
    for (std::size_t j = 0; j < s.size(); ++j) {
        int d = digit_value(s[s.size() - 1 - j], line);
        if (d >= p) throw ParseError("digit out of range for p", line);
        c += stride * static_cast<zp::Code>(d);
        stride *= static_cast<zp::Code>(p);
    }
    return c;
}
}  // namespace

std::string write_boolfn(const BooleanFunction& f) {
    std::ostringstream out;
    out << "BF p=2 n=" << f.n() << "\n";
    for (std::size_t x = 0; x < f.size(); ++x)
        out << (x ? " " : "") << (f(static_cast<Mask>(x)) > 0 ? "+1" : "-1");
    out << "\n";
    return out.str();
}

BooleanFunction read_boolfn(std::istream& in) {
    AnyFunction any = read_function(in);
    if (!any.f2) throw ParseError("expected a p=2 truth table", 1);
    return *any.f2;
}

std::string write_zpfn(const zp::ZpFunction& f) {
    std::ostringstream out;
    out << "BF p=" << f.p() << " n=" << f.n() << "\n";
    for (std::size_t x = 0; x < f.size(); ++x)
        out << (x ? " " : "") << (f(static_cast<zp::Code>(x)) > 0 ? "+1" : "-1");
    out << "\n";
    return out.str();
}

zp::ZpFunction read_zpfn(std::istream& in) {
    AnyFunction any = read_function(in);
    if (!any.fp) throw ParseError("expected a p>2 truth table", 1);
    return *any.fp;
}

AnyFunction read_function(std::istream& in) {
    LineReader reader{in};
    Header h = parse_header(reader.next(), reader.line);
    if (h.tag != "BF") throw ParseError("expected 'BF' header", reader.line);
    std::size_t count = 1;
    for (int i = 0; i < h.n; ++i) count *= static_cast<std::size_t>(h.p);

    std::vector<std::int8_t> values;
    values.reserve(count);
    while (values.size() < count) {
        std::istringstream iss(reader.next());
        std::string tok;
        while (iss >> tok) values.push_back(static_cast<std::int8_t>(parse_pm1(tok, reader.line)));
    }
    if (values.size() != count)
        throw ParseError("expected exactly p^n table entries", reader.line);

    AnyFunction any;
    try {
        if (h.p == 2)
            any.f2 = BooleanFunction(h.n, std::move(values));
        else
            any.fp = zp::ZpFunction(h.p, h.n, std::move(values));
    } catch (const ParamError& e) {
        throw ParseError(e.what(), reader.line);
    }
    return any;
}

AnyFunction read_function_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_function(in);
}

std::string write_spectrum(const Spectrum& s) {
    std::ostringstream out;
    out << "SPEC p=2 n=" << s.n() << "\n";
    for (std::size_t a = 0; a < s.size(); ++a)
        if (s.scaled(static_cast<Mask>(a)) != 0)
            out << mask_to_string(static_cast<Mask>(a), s.n()) << " "
                << s.scaled(static_cast<Mask>(a)) << "\n";
    return out.str();
}

Spectrum read_spectrum(std::istream& in) {
    LineReader reader{in};
    Header h = parse_header(reader.next(), reader.line);
    if (h.tag != "SPEC" || h.p != 2) throw ParseError("expected 'SPEC p=2' header", reader.line);
    std::vector<std::int64_t> scaled(std::size_t(1) << h.n, 0);
    std::string line;
    while (reader.next_optional(line)) {
        std::istringstream iss(line);
        std::string mask_tok;
        std::int64_t value;
        if (!(iss >> mask_tok >> value))
            throw ParseError("expected '<alpha-binary> <scaled-int>'", reader.line);
        Mask alpha = mask_from_string(mask_tok, reader.line);
        if (alpha >= scaled.size()) throw ParseError("alpha out of range", reader.line);
        scaled[alpha] = value;
    }
    try {
        return Spectrum(h.n, std::move(scaled));
    } catch (const ParamError& e) {
        throw ParseError(e.what(), reader.line);
    }
}

// --- trees ------------------------------------------------------------

namespace {

void write_pdt_node(std::ostringstream& out, const ParityDecisionTree::Node& node, int n) {
    if (node.is_leaf()) {
        out << "L " << (node.label > 0 ? "+1" : "-1") << "\n";
        return;
    }
    out << "N " << mask_to_string(node.query, n) << "\n";
    write_pdt_node(out, *node.plus, n);
    write_pdt_node(out, *node.minus, n);
}

void write_fpdt_node(std::ostringstream& out, const FunctionalPdt::Node& node, int n) {
    if (node.is_leaf()) {
        out << "F " << node.leaf->constant.to_string() << "\n";
        return;
    }
    out << "N " << mask_to_string(node.query, n) << "\n";
    write_fpdt_node(out, *node.plus, n);
    write_fpdt_node(out, *node.minus, n);
}

void write_pary_node(std::ostringstream& out, const zp::PAryPdt::Node& node, int n, int p) {
    if (node.is_leaf()) {
        out << "L " << (node.leaf.label > 0 ? "+1" : "-1") << "\n";
        return;
    }
    out << "N " << code_to_string(node.query, n, p) << "\n";
    for (const auto& child : node.children) write_pary_node(out, *child, n, p);
}

Dyadic parse_dyadic(const std::string& tok, int line) {
    auto slash = tok.find('/');
    std::int64_t num, den = 1;
    try {
        num = std::stoll(tok.substr(0, slash));
        if (slash != std::string::npos) den = std::stoll(tok.substr(slash + 1));
    } catch (const std::exception&) {
        throw ParseError("bad rational '" + tok + "'", line);
    }
    if (den <= 0 || (den & (den - 1)) != 0)
        throw ParseError("denominator must be a power of two", line);
    return Dyadic(num, __builtin_ctzll(den));
}

struct TreeParser {
    LineReader reader;
    int p;
    int n;
    bool saw_functional = false;

    struct Line {
        char kind;  // 'N', 'L' or 'F'
        std::string arg;
    };

    Line next_line() {
        std::string s = reader.next();
        std::istringstream iss(s);
        std::string kind, arg;
        if (!(iss >> kind >> arg) || kind.size() != 1 ||
            (kind[0] != 'N' && kind[0] != 'L' && kind[0] != 'F'))
            throw ParseError("expected 'N <form>', 'L <+1|-1>' or 'F <bias>'", reader.line);
        return Line{kind[0], arg};
    }

    std::unique_ptr<ParityDecisionTree::Node> parse_node2() {
        Line l = next_line();
        auto node = std::make_unique<ParityDecisionTree::Node>();
        if (l.kind == 'L') {
            node->label = parse_pm1(l.arg, reader.line);
            return node;
        }
        if (l.kind == 'F') throw ParseError("functional leaf in a plain tree", reader.line);
        node->query = mask_from_string(l.arg, reader.line);
        if (node->query == 0 || node->query >= (Mask(1) << n))
            throw ParseError("query out of range", reader.line);
        node->plus = parse_node2();
        node->minus = parse_node2();
        return node;
    }

    std::unique_ptr<FunctionalPdt::Node> parse_fnode() {
        Line l = next_line();
        auto node = std::make_unique<FunctionalPdt::Node>();
        if (l.kind == 'F' || l.kind == 'L') {
            node->leaf = std::make_unique<FunctionalPdt::Leaf>();
            node->leaf->constant = l.kind == 'F' ? parse_dyadic(l.arg, reader.line)
                                                 : Dyadic::from_int(parse_pm1(l.arg, reader.line));
            return node;
        }
        node->query = mask_from_string(l.arg, reader.line);
        if (node->query == 0 || node->query >= (Mask(1) << n))
            throw ParseError("query out of range", reader.line);
        node->plus = parse_fnode();
        node->minus = parse_fnode();
        return node;
    }

    std::unique_ptr<zp::PAryPdt::Node> parse_pnode() {
        Line l = next_line();
        auto node = std::make_unique<zp::PAryPdt::Node>();
        if (l.kind == 'L') {
            node->leaf.label = parse_pm1(l.arg, reader.line);
            return node;
        }
        if (l.kind == 'F') throw ParseError("functional p-ary leaves are not serialized",
                                            reader.line);
        node->query = code_from_string(l.arg, p, reader.line);
        if (node->query == 0) throw ParseError("query must be nonzero", reader.line);
        node->children.resize(p);
        for (int i = 0; i < p; ++i) node->children[i] = parse_pnode();
        return node;
    }

    // Peek whether the body contains an 'F' leaf: parse as functional when
    // any is present, else as a plain tree.
    static bool contains_functional(std::istream& in) {
        std::streampos pos = in.tellg();
        std::string s;
        bool found = false;
        while (std::getline(in, s))
            if (!s.empty() && s[0] == 'F') {
                found = true;
                break;
            }
        in.clear();
        in.seekg(pos);
        return found;
    }
};

}  // namespace

std::string write_pdt(const ParityDecisionTree& t) {
    std::ostringstream out;
    out << "PDT p=2 n=" << t.n() << "\n";
    write_pdt_node(out, t.root(), t.n());
    return out.str();
}

std::string write_functional_pdt(const FunctionalPdt& t) {
    std::ostringstream out;
    out << "PDT p=2 n=" << t.n() << "\n";
    write_fpdt_node(out, t.root(), t.n());
    return out.str();
}

std::string write_pary_pdt(const zp::PAryPdt& t) {
    std::ostringstream out;
    out << "PDT p=" << t.p() << " n=" << t.n() << "\n";
    write_pary_node(out, t.root(), t.n(), t.p());
    return out.str();
}

AnyTree read_tree(std::istream& in) {
    LineReader header_reader{in};
    Header h = parse_header(header_reader.next(), header_reader.line);
    if (h.tag != "PDT") throw ParseError("expected 'PDT' header", header_reader.line);

    TreeParser parser{LineReader{in, header_reader.line}, h.p, h.n};
    AnyTree any;
    if (h.p == 2) {
        if (TreeParser::contains_functional(in))
            any.fpdt = FunctionalPdt(h.n, parser.parse_fnode());
        else
            any.pdt = ParityDecisionTree(h.n, parser.parse_node2());
    } else {
        any.pary = zp::PAryPdt(h.p, h.n, parser.parse_pnode());
    }
    return any;
}

AnyTree read_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_tree(in);
}

std::string write_restriction(const AffineRestriction& r, int n) {
    std::ostringstream out;
    for (const auto& c : r.constraints())
        out << mask_to_string(c.form, n) << " " << (c.value > 0 ? "+1" : "-1") << "\n";
    return out.str();
}

AffineRestriction read_restriction(std::istream& in, int n) {
    AffineRestriction r;
    LineReader reader{in};
    std::string line;
    while (reader.next_optional(line)) {
        std::istringstream iss(line);
        std::string mask_tok, value_tok;
        if (!(iss >> mask_tok >> value_tok))
            throw ParseError("expected '<gamma-binary> <+1|-1>'", reader.line);
        Mask form = mask_from_string(mask_tok, reader.line);
        if (form == 0 || form >= (Mask(1) << n))
            throw ParseError("form out of range", reader.line);
        try {
            r.push(form, parse_pm1(value_tok, reader.line));
        } catch (const ParamError& e) {
            throw ParseError(e.what(), reader.line);
        }
    }
    return r;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace io
}  // namespace spectral
