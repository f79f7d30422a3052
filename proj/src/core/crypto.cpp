#include "vpki/core/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>

#include "vpki/core/encoding.hpp"

namespace vpki {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct CtxDeleter {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
using CtxPtr = std::unique_ptr<EVP_PKEY_CTX, CtxDeleter>;

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

constexpr size_t kPointLen = 65;
constexpr size_t kScalarLen = 32;

// Builds an EVP_PKEY for P-256 from the uncompressed public point and, when
// given, the private scalar.
PkeyPtr make_pkey(ByteView pub, ByteView priv) {
    OSSL_PARAM_BLD* bld = OSSL_PARAM_BLD_new();
    if (!bld) return nullptr;
    PkeyPtr result;
    BIGNUM* priv_bn = nullptr;
    OSSL_PARAM* params = nullptr;
    do {
        if (!OSSL_PARAM_BLD_push_utf8_string(bld, OSSL_PKEY_PARAM_GROUP_NAME,
                                             "P-256", 0)) {
            break;
        }
        if (!pub.empty() &&
            !OSSL_PARAM_BLD_push_octet_string(bld, OSSL_PKEY_PARAM_PUB_KEY,
                                              pub.data(), pub.size())) {
            break;
        }
        if (!priv.empty()) {
            priv_bn = BN_bin2bn(priv.data(), static_cast<int>(priv.size()), nullptr);
            if (!priv_bn ||
                !OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_PRIV_KEY, priv_bn)) {
                break;
            }
        }
        params = OSSL_PARAM_BLD_to_param(bld);
        if (!params) break;
        CtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
        if (!ctx || EVP_PKEY_fromdata_init(ctx.get()) <= 0) break;
        EVP_PKEY* raw = nullptr;
        int selection = priv.empty() ? EVP_PKEY_PUBLIC_KEY : EVP_PKEY_KEYPAIR;
        if (EVP_PKEY_fromdata(ctx.get(), &raw, selection, params) <= 0) break;
        result.reset(raw);
    } while (false);
    OSSL_PARAM_free(params);
    BN_free(priv_bn);
    OSSL_PARAM_BLD_free(bld);
    return result;
}

// Derives the uncompressed public point for a private scalar.
Bytes public_point_for(ByteView scalar) {
    EC_GROUP* group = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (!group) throw CryptoError("EC group");
    Bytes out(kPointLen);
    BIGNUM* k = BN_bin2bn(scalar.data(), static_cast<int>(scalar.size()), nullptr);
    EC_POINT* point = EC_POINT_new(group);
    bool ok = k && point && !BN_is_zero(k) &&
              BN_cmp(k, EC_GROUP_get0_order(group)) < 0 &&
              EC_POINT_mul(group, point, k, nullptr, nullptr, nullptr) == 1 &&
              EC_POINT_point2oct(group, point, POINT_CONVERSION_UNCOMPRESSED,
                                 out.data(), out.size(), nullptr) == kPointLen;
    EC_POINT_free(point);
    BN_free(k);
    EC_GROUP_free(group);
    if (!ok) throw CryptoError("invalid private scalar");
    return out;
}

}  // namespace

Digest hash(ByteView data) {
    Digest out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Digest hash_fields(std::initializer_list<ByteView> fields) {
    Bytes encoded = canonical_encode(fields);
    return hash(encoded);
}

Digest iterated_hash(ByteView seed, uint64_t i) {
    if (i == 0) throw std::domain_error("iterated_hash requires i >= 1");
    Digest d = hash(seed);
    for (uint64_t k = 1; k < i; ++k) d = hash(d);
    return d;
}

Bytes gen_rnd() { return gen_rnd(32); }

Bytes gen_rnd(size_t n) {
    Bytes out(n);
    if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
        throw CryptoError("entropy failure");
    }
    return out;
}

KeyPair KeyPair::generate() {
    for (int attempt = 0; attempt < 8; ++attempt) {
        Bytes scalar = gen_rnd(kScalarLen);
        try {
            return from_private(scalar);
        } catch (const CryptoError&) {
            // scalar out of range for the group order; redraw
        }
    }
    throw CryptoError("keygen failed");
}

KeyPair KeyPair::from_private(ByteView scalar) {
    if (scalar.size() != kScalarLen) throw CryptoError("bad scalar length");
    KeyPair kp;
    kp.public_ = public_point_for(scalar);
    kp.private_.assign(scalar.begin(), scalar.end());
    return kp;
}

Bytes KeyPair::sign(ByteView msg) const {
    PkeyPtr key = make_pkey(public_, private_);
    if (!key) throw CryptoError("signing key load");
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr,
                                   key.get()) <= 0) {
        throw CryptoError("sign init");
    }
    size_t len = 0;
    if (EVP_DigestSign(ctx.get(), nullptr, &len, msg.data(), msg.size()) <= 0) {
        throw CryptoError("sign size");
    }
    Bytes sig(len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, msg.data(), msg.size()) <= 0) {
        throw CryptoError("sign");
    }
    sig.resize(len);
    return sig;
}

bool verify(ByteView public_key, ByteView msg, ByteView signature) {
    if (public_key.size() != kPointLen || public_key[0] != 0x04) return false;
    if (signature.empty()) return false;
    PkeyPtr key = make_pkey(public_key, {});
    if (!key) return false;
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr,
                                     key.get()) <= 0) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            msg.data(), msg.size()) == 1;
}

}  // namespace vpki
