#include "framegate/codec.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "framegate/error.hpp"

namespace framegate {

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

constexpr std::string_view magic = "fg";
constexpr std::string_view terminator = "end";

std::string_view kind_token(MessageKind k)
{
    switch (k) {
    case MessageKind::Hello: return "hello";
    case MessageKind::Request: return "request";
    case MessageKind::Answer: return "answer";
    case MessageKind::Correction: return "correction";
    case MessageKind::Verify: return "verify";
    case MessageKind::Abort: return "abort";
    }
    return "?";
}

class Writer {
  public:
    void word(std::string_view w)
    {
        sep();
        out_ += w;
    }
    void number(double v)
    {
        sep();
        out_ += format_double(v);
    }
    void integer(std::uint64_t v)
    {
        sep();
        out_ += std::to_string(v);
    }
    void text(std::string_view s)
    {
        sep();
        out_ += '"';
        for (char c : s) {
            switch (c) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\r': out_ += "\\r"; break;
            case '\t': out_ += "\\t"; break;
            default: out_ += c;
            }
        }
        out_ += '"';
    }
    void matrix(const ComplexMatrix& m)
    {
        word("m");
        integer(static_cast<std::uint64_t>(m.dim()));
        for (const Complex& z : m.entries()) {
            number(z.real());
            number(z.imag());
        }
    }
    void numbers(const std::vector<double>& v)
    {
        integer(v.size());
        for (double x : v) {
            number(x);
        }
    }
    void group(const std::optional<GLParityElement>& g)
    {
        if (!g) {
            word("none");
            return;
        }
        word("T");
        word(g->kind() == 1 ? "+" : "-");
        matrix(g->Y());
    }
    std::string take() { return std::move(out_); }

  private:
    void sep()
    {
        if (!out_.empty()) {
            out_ += ' ';
        }
    }
    std::string out_;
};

class Reader {
  public:
    explicit Reader(std::string_view s) : s_(s) {}

    [[noreturn]] void malformed(const std::string& expected) const
    {
        fail(ErrorCode::Malformed, "offset " + std::to_string(pos_) + ": expected " + expected);
    }

    std::string_view word(const char* what)
    {
        begin_token(what);
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ' ') {
            ++pos_;
        }
        if (pos_ == start) {
            malformed(what);
        }
        return s_.substr(start, pos_ - start);
    }

    void keyword(std::string_view kw)
    {
        const std::size_t at = pos_;
        if (word(std::string(kw).c_str()) != kw) {
            pos_ = at;
            malformed("'" + std::string(kw) + "'");
        }
    }

    double number(const char* what = "number")
    {
        const std::size_t at = pos_;
        const auto w = word(what);
        double v = 0.0;
        const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
        // Only the canonical rendering of a finite double is accepted.
        if (res.ec != std::errc{} || res.ptr != w.data() + w.size() || !std::isfinite(v) || format_double(v) != w) {
            pos_ = at;
            malformed(what);
        }
        return v;
    }

    std::uint64_t integer(const char* what, std::uint64_t max = std::numeric_limits<std::uint64_t>::max())
    {
        const std::size_t at = pos_;
        const auto w = word(what);
        std::uint64_t v = 0;
        const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
        if (res.ec != std::errc{} || res.ptr != w.data() + w.size() || v > max || std::to_string(v) != w) {
            pos_ = at;
            malformed(what);
        }
        return v;
    }

    std::string text(const char* what)
    {
        begin_token(what);
        if (pos_ >= s_.size() || s_[pos_] != '"') {
            malformed(std::string("quoted ") + what);
        }
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= s_.size()) {
                malformed("closing quote");
            }
            const char c = s_[pos_++];
            if (c == '"') {
                break;
            }
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= s_.size()) {
                malformed("escape character");
            }
            switch (s_[pos_++]) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 't': out += '\t'; break;
            default: --pos_; malformed("escape character");
            }
        }
        if (pos_ < s_.size() && s_[pos_] != ' ') {
            malformed("separator");
        }
        return out;
    }

    ComplexMatrix matrix()
    {
        keyword("m");
        const auto dim = static_cast<int>(integer("matrix dimension 1..16", max_dim));
        if (dim < 1) {
            malformed("matrix dimension 1..16");
        }
        ComplexMatrix m(dim);
        for (Complex& z : m.entries()) {
            const double re = number("real part");
            const double im = number("imaginary part");
            z = Complex(re, im);
        }
        if (!m.all_finite()) {
            malformed("finite matrix entries");
        }
        return m;
    }

    std::vector<double> numbers(const char* what)
    {
        const auto n = integer("list length", 4096);
        std::vector<double> out;
        out.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            out.push_back(number(what));
        }
        return out;
    }

    std::optional<GLParityElement> group()
    {
        const std::size_t at = pos_;
        const auto tag = word("'none' or 'T'");
        if (tag == "none") {
            return std::nullopt;
        }
        if (tag != "T") {
            pos_ = at;
            malformed("'none' or 'T'");
        }
        const int kind = sign();
        const std::size_t mat_at = pos_;
        ComplexMatrix y = matrix();
        try {
            return GLParityElement::make(y, kind);
        }
        catch (const Error& e) {
            pos_ = mat_at;
            malformed(std::string("invertible group matrix (") + e.what() + ")");
        }
    }

    int sign()
    {
        const std::size_t at = pos_;
        const auto w = word("'+' or '-'");
        if (w == "+") {
            return 1;
        }
        if (w == "-") {
            return -1;
        }
        pos_ = at;
        malformed("'+' or '-'");
    }

    [[nodiscard]] std::size_t position() const noexcept { return pos_; }
    void finish()
    {
        if (pos_ != s_.size()) {
            malformed("end of message");
        }
    }

  private:
    void begin_token(const char* what)
    {
        if (pos_ == 0 && first_) {
            first_ = false;
            return;
        }
        first_ = false;
        if (pos_ >= s_.size() || s_[pos_] != ' ') {
            malformed(what);
        }
        ++pos_;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    bool first_ = true;
};

void write_body(Writer& w, const HelloMsg& m)
{
    w.integer(m.version);
    w.text(m.role);
    w.text(m.scenario);
}

void write_body(Writer& w, const RequestMsg& m)
{
    w.text(m.system_class_id);
    w.word("mode");
    if (m.mode.is_sampled()) {
        w.word("sampled");
        w.integer(m.mode.copies);
        w.integer(m.mode.seed);
    }
    else {
        w.word("exact");
    }
    w.word("obs");
    w.integer(m.observables.size());
    for (std::size_t i = 0; i < m.observables.size(); ++i) {
        w.text(m.observables[i].label);
        w.matrix(m.observables[i].matrix);
        w.word("ev");
        w.numbers(i < m.eigenvalues.size() ? m.eigenvalues[i] : std::vector<double>{});
        w.word("pr");
        w.numbers(i < m.probabilities.size() ? m.probabilities[i] : std::vector<double>{});
    }
}

void write_body(Writer& w, const AnswerMsg& m)
{
    w.word("state");
    w.matrix(m.state.rho());
    if (m.state.metric()) {
        w.word("metric");
        w.matrix(*m.state.metric());
    }
    else {
        w.word("canonical");
    }
    w.word("desc");
    w.word(m.descriptor.parity() == 1 ? "+" : "-");
    w.matrix(m.descriptor.R());
    w.matrix(m.descriptor.U());
}

void write_body(Writer& w, const CorrectionMsg& m)
{
    w.word(m.placement == Placement::Pre ? "pre" : "post");
    w.group(m.transform);
}

void write_body(Writer& w, const VerifyMsg& m)
{
    w.word(m.success ? "ok" : "fail");
    w.number(m.fidelity);
    w.number(m.residual);
    w.group(m.recovered);
}

void write_body(Writer& w, const AbortMsg& m)
{
    w.text(m.code);
    w.text(m.reason);
}

HelloMsg read_hello(Reader& r)
{
    HelloMsg m;
    const std::size_t at = r.position();
    m.version = static_cast<std::uint32_t>(r.integer("protocol version", std::numeric_limits<std::uint32_t>::max()));
    m.role = r.text("role");
    m.scenario = r.text("scenario");
    r.keyword(terminator);
    r.finish();
    if (m.version != protocol_version) {
        fail(ErrorCode::VersionMismatch, "offset " + std::to_string(at) + ": peer speaks version "
                                             + std::to_string(m.version) + ", this build speaks "
                                             + std::to_string(protocol_version));
    }
    return m;
}

RequestMsg read_request(Reader& r)
{
    RequestMsg m;
    m.system_class_id = r.text("system class id");
    r.keyword("mode");
    const std::size_t at = r.position();
    const auto mode = r.word("'exact' or 'sampled'");
    if (mode == "sampled") {
        const auto copies = r.integer("copy count");
        const auto seed = r.integer("seed");
        m.mode = Mode::sampled(copies, seed);
    }
    else if (mode != "exact") {
        (void)at;
        r.malformed("'exact' or 'sampled'");
    }
    r.keyword("obs");
    const auto n = r.integer("observable count", 256);
    for (std::uint64_t i = 0; i < n; ++i) {
        DescribedObservable o;
        o.label = r.text("observable label");
        o.matrix = r.matrix();
        m.observables.push_back(std::move(o));
        r.keyword("ev");
        m.eigenvalues.push_back(r.numbers("eigenvalue"));
        r.keyword("pr");
        m.probabilities.push_back(r.numbers("probability"));
    }
    return m;
}

AnswerMsg read_answer(Reader& r)
{
    r.keyword("state");
    const std::size_t state_at = r.position();
    ComplexMatrix rho = r.matrix();
    const auto tag = r.word("'metric' or 'canonical'");
    std::optional<ComplexMatrix> metric;
    if (tag == "metric") {
        metric = r.matrix();
    }
    else if (tag != "canonical") {
        r.malformed("'metric' or 'canonical'");
    }
    r.keyword("desc");
    const int parity = r.sign();
    const std::size_t desc_at = r.position();
    ComplexMatrix big_r = r.matrix();
    ComplexMatrix u = r.matrix();
    std::optional<State> state;
    try {
        state = State::make(std::move(rho), std::move(metric));
    }
    catch (const Error& e) {
        fail(ErrorCode::Malformed, "offset " + std::to_string(state_at) + ": expected a valid state (" + e.what() + ")");
    }
    try {
        return AnswerMsg{*state, SystemDescriptor::make(std::move(big_r), std::move(u), parity)};
    }
    catch (const Error& e) {
        fail(ErrorCode::Malformed,
             "offset " + std::to_string(desc_at) + ": expected a valid system descriptor (" + e.what() + ")");
    }
}

CorrectionMsg read_correction(Reader& r)
{
    CorrectionMsg m;
    const auto placement = r.word("'pre' or 'post'");
    if (placement == "post") {
        m.placement = Placement::Post;
    }
    else if (placement != "pre") {
        r.malformed("'pre' or 'post'");
    }
    m.transform = r.group();
    return m;
}

VerifyMsg read_verify(Reader& r)
{
    VerifyMsg m;
    const auto status = r.word("'ok' or 'fail'");
    if (status == "ok") {
        m.success = true;
    }
    else if (status != "fail") {
        r.malformed("'ok' or 'fail'");
    }
    m.fidelity = r.number("fidelity");
    m.residual = r.number("residual");
    m.recovered = r.group();
    return m;
}

AbortMsg read_abort(Reader& r)
{
    AbortMsg m;
    m.code = r.text("error code");
    m.reason = r.text("reason");
    return m;
}

}  // namespace

std::string encode(const WireMessage& msg)
{
    Writer w;
    w.word(magic);
    w.word(kind_token(msg.kind()));
    w.integer(msg.session_id);
    std::visit([&w](const auto& body) { write_body(w, body); }, msg.body);
    w.word(terminator);
    return w.take();
}

WireMessage decode(std::string_view payload)
{
    Reader r(payload);
    r.keyword(magic);
    const auto kind = r.word("message kind");
    const std::size_t kind_at = r.position() - kind.size();
    WireMessage msg;
    msg.session_id = r.integer("session id");
    if (kind == "hello") {
        msg.body = read_hello(r);
        return msg;
    }
    if (kind == "request") {
        msg.body = read_request(r);
    }
    else if (kind == "answer") {
        msg.body = read_answer(r);
    }
    else if (kind == "correction") {
        msg.body = read_correction(r);
    }
    else if (kind == "verify") {
        msg.body = read_verify(r);
    }
    else if (kind == "abort") {
        msg.body = read_abort(r);
    }
    else {
        fail(ErrorCode::Malformed, "offset " + std::to_string(kind_at) + ": expected message kind");
    }
    r.keyword(terminator);
    r.finish();
    return msg;
}

std::string frame(std::string_view payload)
{
    if (payload.size() > max_frame_payload) {
        fail(ErrorCode::Malformed, "payload of " + std::to_string(payload.size()) + " bytes exceeds the frame limit");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::string out;
    out.reserve(payload.size() + 4);
    for (int b = 0; b < 4; ++b) {
        out += static_cast<char>((n >> (8 * b)) & 0xffu);
    }
    out += payload;
    return out;
}

std::optional<std::string> unframe(std::string_view buffer, std::size_t& consumed)
{
    consumed = 0;
    if (buffer.size() < 4) {
        return std::nullopt;
    }
    std::uint32_t n = 0;
    for (int b = 0; b < 4; ++b) {
        n |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer[static_cast<std::size_t>(b)])) << (8 * b);
    }
    if (n > max_frame_payload) {
        fail(ErrorCode::Malformed, "offset 0: expected frame length <= " + std::to_string(max_frame_payload) + ", got "
                                       + std::to_string(n));
    }
    if (buffer.size() < 4 + static_cast<std::size_t>(n)) {
        return std::nullopt;
    }
    consumed = 4 + static_cast<std::size_t>(n);
    return std::string(buffer.substr(4, n));
}

}  // namespace framegate
