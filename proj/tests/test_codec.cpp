#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "framegate/codec.hpp"
#include "framegate/error.hpp"
#include "framegate/protocol.hpp"
#include "support.hpp"

using namespace framegate;
using framegate::testing::Gen;

namespace {

std::string random_text(Gen& gen)
{
    static const std::string alphabet = "abcXYZ019 _-\"\\\n\t\r{}";
    std::string s;
    const int n = gen.index(12);
    for (int i = 0; i < n; ++i) {
        s += alphabet[static_cast<std::size_t>(gen.index(static_cast<int>(alphabet.size())))];
    }
    return s;
}

State random_state(Gen& gen, int dim)
{
    const State plain = State::make(gen.density(dim));
    if (gen.index(2) == 0) {
        return plain;
    }
    return apply_encoding(Encoding::make(gen.bounded_invertible(dim, 0.5), gen.parity()), plain);
}

std::optional<GLParityElement> random_group(Gen& gen, int dim)
{
    if (gen.index(3) == 0) {
        return std::nullopt;
    }
    return GLParityElement::make(gen.bounded_invertible(dim, 0.5), gen.parity());
}

Mode random_mode(Gen& gen)
{
    if (gen.index(2) == 0) {
        return Mode::exact();
    }
    return Mode::sampled(1 + static_cast<std::uint64_t>(gen.index(1000000)), gen.rng().bits());
}

WireMessage random_message(Gen& gen)
{
    WireMessage msg;
    msg.session_id = gen.rng().bits();
    const int dim = 1 + gen.index(4);
    switch (gen.index(6)) {
    case 0:
        msg.body = HelloMsg{protocol_version, random_text(gen), random_text(gen)};
        break;
    case 1: {
        const State s = random_state(gen, dim);
        RequestMsg r = make_request(s, s.metric() ? ScenarioKind::Typed : ScenarioKind::Abstract, random_mode(gen));
        r.system_class_id = random_text(gen);
        msg.body = std::move(r);
        break;
    }
    case 2: {
        const State s = random_state(gen, dim);
        msg.body = AnswerMsg{s, SystemDescriptor::make(s.metric_or_identity(), gen.unitary(dim), gen.parity())};
        break;
    }
    case 3:
        msg.body = CorrectionMsg{gen.index(2) == 0 ? Placement::Pre : Placement::Post, random_group(gen, dim)};
        break;
    case 4:
        msg.body = VerifyMsg{gen.index(2) == 0, gen.uniform(0.0, 1.0), std::ldexp(gen.uniform(0.0, 1.0), -gen.index(60)),
                             random_group(gen, dim)};
        break;
    default:
        msg.body = AbortMsg{std::string(to_string(ErrorCode::PeerAbort)), random_text(gen)};
        break;
    }
    return msg;
}

bool same_bits(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.dim() != b.dim()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a.entries()[i].real()) != std::bit_cast<std::uint64_t>(b.entries()[i].real())
            || std::bit_cast<std::uint64_t>(a.entries()[i].imag()) != std::bit_cast<std::uint64_t>(b.entries()[i].imag())) {
            return false;
        }
    }
    return true;
}

ErrorCode decode_error(std::string_view payload, std::string* what = nullptr)
{
    try {
        (void)decode(payload);
    }
    catch (const Error& e) {
        if (what != nullptr) {
            *what = e.what();
        }
        return e.code();
    }
    ADD_FAILURE() << "decoded: " << payload;
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-0.0), "-0");
    Gen gen(501);
    for (int i = 0; i < 10000; ++i) {
        const double v = std::ldexp(gen.uniform(-1.0, 1.0), gen.index(200) - 100);
        const std::string s = format_double(v);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(std::stod(s)), std::bit_cast<std::uint64_t>(v)) << s;
    }
}

TEST(Codec, HelloRoundTrip)
{
    const WireMessage msg{42, HelloMsg{protocol_version, "alice", "agree-abstract"}};
    const std::string bytes = encode(msg);
    const WireMessage back = decode(bytes);
    ASSERT_EQ(back.kind(), MessageKind::Hello);
    EXPECT_EQ(back.session_id, 42u);
    EXPECT_EQ(std::get<HelloMsg>(back.body).scenario, "agree-abstract");
    EXPECT_EQ(bytes.rfind("fg hello 42 ", 0), 0u) << bytes;
}

TEST(Codec, AnswerIsBitExact)
{
    Gen gen(502);
    const State s = random_state(gen, 3);
    const SystemDescriptor d = SystemDescriptor::make(s.metric_or_identity(), gen.unitary(3), -1);
    const WireMessage back = decode(encode({7, AnswerMsg{s, d}}));
    const auto& a = std::get<AnswerMsg>(back.body);
    EXPECT_TRUE(same_bits(a.state.rho(), s.rho()));
    EXPECT_EQ(a.state.metric().has_value(), s.metric().has_value());
    EXPECT_TRUE(same_bits(a.descriptor.U(), d.U()));
    EXPECT_EQ(a.descriptor.parity(), -1);
}

TEST(Codec, PropertyCanonicalRoundTrip)
{
    Gen gen(503);
    for (int i = 0; i < 100000; ++i) {
        const WireMessage msg = random_message(gen);
        const std::string bytes = encode(msg);
        const WireMessage back = decode(bytes);
        ASSERT_EQ(back.kind(), msg.kind()) << "case " << i;
        ASSERT_EQ(back.session_id, msg.session_id) << "case " << i;
        ASSERT_EQ(encode(back), bytes) << "case " << i;
    }
}

TEST(Codec, TruncationIsMalformedWithOffset)
{
    Gen gen(504);
    for (int i = 0; i < 200; ++i) {
        const std::string bytes = encode(random_message(gen));
        const std::size_t cut = static_cast<std::size_t>(gen.index(static_cast<int>(bytes.size())));
        std::string what;
        const ErrorCode code = decode_error(std::string_view(bytes).substr(0, cut), &what);
        // A cut inside the version number can still parse as another version.
        EXPECT_TRUE(code == ErrorCode::Malformed || code == ErrorCode::VersionMismatch) << what;
        EXPECT_NE(what.find("offset "), std::string::npos) << what;
    }
}

TEST(Codec, RejectsGarbage)
{
    EXPECT_EQ(decode_error(""), ErrorCode::Malformed);
    EXPECT_EQ(decode_error("fg"), ErrorCode::Malformed);
    EXPECT_EQ(decode_error("xx hello 1 1 \"a\" \"b\""), ErrorCode::Malformed);
    EXPECT_EQ(decode_error("fg gossip 1"), ErrorCode::Malformed);
    EXPECT_EQ(decode_error(encode({1, AbortMsg{"PeerAbort", "bye"}}) + " trailing"), ErrorCode::Malformed);
    std::string what;
    EXPECT_EQ(decode_error("fg frobnicate 3", &what), ErrorCode::Malformed);
    EXPECT_NE(what.find("offset 3"), std::string::npos) << what;
}

TEST(Codec, VersionSkew)
{
    HelloMsg h{protocol_version + 1, "alice", "game-typed"};
    std::string what;
    EXPECT_EQ(decode_error(encode({1, h}), &what), ErrorCode::VersionMismatch);
    EXPECT_NE(what.find("version 2"), std::string::npos) << what;
}

TEST(Codec, FuzzedPayloadsNeverEscape)
{
    Gen gen(505);
    std::vector<std::string> corpus;
    for (int i = 0; i < 50; ++i) {
        corpus.push_back(encode(random_message(gen)));
    }
    int accepted = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string bytes = corpus[static_cast<std::size_t>(gen.index(static_cast<int>(corpus.size())))];
        const int edits = 1 + gen.index(4);
        for (int e = 0; e < edits && !bytes.empty(); ++e) {
            const auto at = static_cast<std::size_t>(gen.index(static_cast<int>(bytes.size())));
            switch (gen.index(3)) {
            case 0: bytes[at] = static_cast<char>(gen.index(256)); break;
            case 1: bytes.erase(at, 1); break;
            default: bytes.insert(at, 1, static_cast<char>(gen.index(256))); break;
            }
        }
        try {
            (void)decode(bytes);
            ++accepted;
        }
        catch (const Error& e) {
            ASSERT_TRUE(e.code() == ErrorCode::Malformed || e.code() == ErrorCode::VersionMismatch) << e.what();
        }
    }
    EXPECT_LT(accepted, 20000);
}

TEST(Frame, RoundTripAndPartialBuffers)
{
    const std::string payload = encode({9, AbortMsg{"Timeout", "slow"}});
    const std::string framed = frame(payload);
    ASSERT_EQ(framed.size(), payload.size() + 4);
    EXPECT_EQ(static_cast<unsigned char>(framed[0]), payload.size() & 0xffu);
    std::size_t used = 0;
    for (std::size_t n = 0; n < framed.size(); ++n) {
        EXPECT_FALSE(unframe(std::string_view(framed).substr(0, n), used).has_value());
        EXPECT_EQ(used, 0u);
    }
    const std::string two = framed + frame("x");
    const auto first = unframe(two, used);
    ASSERT_TRUE(first.has_value());
    EXPECT_EQ(*first, payload);
    EXPECT_EQ(used, framed.size());
    const auto second = unframe(std::string_view(two).substr(used), used);
    ASSERT_TRUE(second.has_value());
    EXPECT_EQ(*second, "x");
}

TEST(Frame, OversizedLengthIsMalformed)
{
    const std::string bad("\xff\xff\xff\x7f", 4);
    std::size_t used = 0;
    try {
        (void)unframe(bad, used);
        ADD_FAILURE() << "accepted oversized frame";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Malformed);
    }
}

TEST(Codec, RejectsNonCanonicalTokens)
{
    const std::string good = encode({5, VerifyMsg{true, 1.0, 0.25, std::nullopt}});
    ASSERT_EQ(good, "fg verify 5 ok 1 0.25 none end");
    EXPECT_NO_THROW((void)decode(good));
    for (const char* bad : {"fg verify 5 ok 1.0 0.25 none end", "fg verify 5 ok 1 nan none end",
                            "fg verify 5 ok 1 inf none end", "fg verify 05 ok 1 0.25 none end",
                            "fg verify 5 ok 1 0.250 none end", "fg verify 5  ok 1 0.25 none end"}) {
        std::string what;
        EXPECT_EQ(decode_error(bad, &what), ErrorCode::Malformed) << bad;
        EXPECT_NE(what.find("offset "), std::string::npos) << what;
    }
}
