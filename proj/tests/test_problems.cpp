#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "dfmo/problems.hpp"
#include "dfmo/protocol.hpp"

using namespace dfmo;

namespace {

std::string server(const char* mode) { return std::string("'") + DFMO_TESTSERVER_PATH + "' " + mode; }

}  // namespace

TEST(Builtin, RemarkValues) {
    const auto p = builtin("remark_a1");
    EXPECT_EQ(p.n, 1u);
    EXPECT_EQ(p.q, 2u);
    EXPECT_EQ(p.eval(Vector{1.0}), (Vector{1.0, 0.5}));
    EXPECT_EQ(p.eval(Vector{0.0}), (Vector{0.0, 16.0 / 18.0}));
    EXPECT_EQ(p.eval(Vector{4.0}), (Vector{16.0, 0.0}));
}

TEST(Builtin, Catalogue) {
    const auto nd = builtin("remark_a1_n3");
    EXPECT_EQ(nd.n, 3u);
    EXPECT_EQ(nd.eval(Vector{1.0, 1.0, 1.0}), (Vector{3.0, 27.0 / 18.0}));
    const auto tri = builtin("tri_sphere");
    EXPECT_EQ(tri.q, 3u);
    EXPECT_EQ(tri.eval(Vector{0.0, 0.0}), (Vector{0.0, 1.0, 1.0}));
    EXPECT_THROW(builtin("remark_a1_n0"), ConfigError);
    EXPECT_THROW(builtin("remark_a1_nx"), ConfigError);
    EXPECT_THROW(builtin("zdt1"), ConfigError);
}

TEST(Protocol, SeventeenDigitsRoundTrip) {
    std::mt19937_64 rng(59);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int trial = 0; trial < 20000; ++trial) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        const Vector back = decode_line(format_real(v));
        ASSERT_EQ(back.size(), 1u);
        EXPECT_EQ(std::memcmp(&back[0], &v, sizeof v), 0) << format_real(v);
    }
}

TEST(Protocol, EncodeDecode) {
    EXPECT_EQ(encode_line(Vector{1.0, 0.5}), "1 0.5\n");
    EXPECT_EQ(decode_line("  1.5\t-2e3 "), (Vector{1.5, -2000.0}));
    EXPECT_TRUE(decode_line("").empty());
    EXPECT_THROW(decode_line("1.0 banana"), ProtocolError);
    EXPECT_THROW(decode_line("1,5"), ProtocolError);
}

TEST(Protocol, TimeoutFromEnvironment) {
    ::setenv(kTimeoutEnvVar, "1234", 1);
    EXPECT_EQ(timeout_from_env(), 1234);
    ::setenv(kTimeoutEnvVar, "bogus", 1);
    EXPECT_EQ(timeout_from_env(), kDefaultTimeoutMs);
    ::unsetenv(kTimeoutEnvVar);
    EXPECT_EQ(timeout_from_env(), kDefaultTimeoutMs);
}

TEST(LineProtocolClient, IdentityServerRoundTrips) {
    LineProtocolClient client(server("identity"), 5000);
    const Vector x{0.1, -3.0, 1e-300, 12345.678901234567};
    EXPECT_EQ(client.evaluate(x), x);
    EXPECT_EQ(client.evaluate(x, 4), x);
}

TEST(LineProtocolClient, ErrorsAreDistinct) {
    const Vector x{1.0};
    {
        LineProtocolClient c(server("nan"), 5000);
        EXPECT_THROW(c.evaluate(x), NonFiniteReply);
    }
    {
        LineProtocolClient c(server("err"), 5000);
        try {
            c.evaluate(x);
            FAIL() << "expected RemoteEvaluationError";
        } catch (const RemoteEvaluationError& e) {
            EXPECT_NE(std::string(e.what()).find("objective undefined here"), std::string::npos);
        }
    }
    {
        LineProtocolClient c(server("garbage"), 5000);
        EXPECT_THROW(c.evaluate(x), ProtocolError);
    }
    {
        LineProtocolClient c(server("short"), 5000);
        EXPECT_THROW(c.evaluate(x, 2), ProtocolError);
    }
    {
        LineProtocolClient c(server("silent"), 200);
        EXPECT_THROW(c.evaluate(x), TimeoutError);
    }
    {
        LineProtocolClient c("exit 0", 2000);
        EXPECT_THROW(c.evaluate(x), OracleError);
    }
}

TEST(ExternalBlackbox, MatchesBuiltinRemark) {
    const auto builtin_p = problems::remark_a1();
    const auto ext = external_blackbox(server("remark_a1"), {DecisionPoint(Vector{1.0})}, 2, 5000);
    EXPECT_EQ(ext.n, 1u);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const Vector x{u(rng)};
        const Vector a = builtin_p.eval(x), b = ext.eval(x);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-15 * std::max(1.0, std::abs(a[j])));
    }
    EXPECT_THROW(external_blackbox(server("remark_a1"), {}), ConfigError);
}
