#include "vpki/core/types.hpp"

#include "vpki/core/encoding.hpp"

namespace vpki {

Bytes LongTermCertificate::tbs_bytes() const {
    return canonical_encode({serial, subject_public_key, vpki::to_bytes(issuer_id),
                             u64be(valid_from), u64be(valid_to)});
}

Bytes LongTermCertificate::to_bytes() const {
    return canonical_encode({serial, subject_public_key, vpki::to_bytes(issuer_id),
                             u64be(valid_from), u64be(valid_to), signature});
}

LongTermCertificate LongTermCertificate::from_bytes(ByteView data) {
    Decoder d(data);
    LongTermCertificate c;
    c.serial = d.fixed(kSerialLen);
    c.subject_public_key = d.fixed(kPublicKeyLen);
    c.issuer_id = to_string(d.field());
    c.valid_from = d.u64_field();
    c.valid_to = d.u64_field();
    c.signature = d.field();
    d.expect_done();
    if (c.valid_from >= c.valid_to) throw EncodingError("empty validity window");
    return c;
}

bool LongTermCertificate::verify_under(ByteView issuer_public_key) const {
    return verify(issuer_public_key, tbs_bytes(), signature);
}

Bytes Ticket::tbs_bytes() const {
    return canonical_encode({serial, target_hash, ik_tkt, u64be(t_s), u64be(t_e),
                             u64be(exp_tkt)});
}

Bytes Ticket::to_bytes() const {
    return canonical_encode({serial, target_hash, ik_tkt, u64be(t_s), u64be(t_e),
                             u64be(exp_tkt), signature});
}

Ticket Ticket::from_bytes(ByteView data) {
    Decoder d(data);
    Ticket t;
    t.serial = d.fixed(kSerialLen);
    t.target_hash = d.digest_field();
    t.ik_tkt = d.digest_field();
    t.t_s = d.u64_field();
    t.t_e = d.u64_field();
    t.exp_tkt = d.u64_field();
    t.signature = d.field();
    d.expect_done();
    if (!(t.t_s < t.t_e && t.t_e <= t.exp_tkt)) {
        throw EncodingError("bad ticket window");
    }
    return t;
}

bool Ticket::verify_under(ByteView ltca_public_key) const {
    return verify(ltca_public_key, tbs_bytes(), signature);
}

Bytes Pseudonym::tbs_bytes() const {
    return canonical_encode({serial, public_key, ik_p, u64be(t_s), u64be(t_e),
                             vpki::to_bytes(issuer_id)});
}

Bytes Pseudonym::to_bytes() const {
    return canonical_encode({serial, public_key, ik_p, u64be(t_s), u64be(t_e),
                             vpki::to_bytes(issuer_id), signature});
}

Pseudonym Pseudonym::from_bytes(ByteView data) {
    Decoder d(data);
    Pseudonym p;
    p.serial = d.digest_field();
    p.public_key = d.fixed(kPublicKeyLen);
    p.ik_p = d.digest_field();
    p.t_s = d.u64_field();
    p.t_e = d.u64_field();
    p.issuer_id = to_string(d.field());
    p.signature = d.field();
    d.expect_done();
    if (p.t_s >= p.t_e) throw EncodingError("bad pseudonym window");
    return p;
}

bool Pseudonym::verify_under(ByteView pca_public_key) const {
    return verify(pca_public_key, tbs_bytes(), signature);
}

void TrustStore::add_anchor(const LongTermCertificate& cert) {
    anchors_.push_back(cert);
}

void TrustStore::add_certificate(const LongTermCertificate& cert) {
    certs_.push_back(cert);
}

bool TrustStore::validate(const LongTermCertificate& cert) const {
    for (const auto& a : anchors_) {
        if (cert.verify_under(a.subject_public_key)) return true;
    }
    // One level of cross certification: signed by a stored certificate that
    // itself chains to an anchor.
    for (const auto& c : certs_) {
        if (!cert.verify_under(c.subject_public_key)) continue;
        for (const auto& a : anchors_) {
            if (c.verify_under(a.subject_public_key)) return true;
        }
        for (const auto& c2 : certs_) {
            if (!c.verify_under(c2.subject_public_key)) continue;
            for (const auto& a : anchors_) {
                if (c2.verify_under(a.subject_public_key)) return true;
            }
        }
    }
    return false;
}

std::optional<LongTermCertificate> TrustStore::find_verifier(ByteView msg,
                                                             ByteView sig) const {
    for (const auto& c : certs_) {
        if (verify(c.subject_public_key, msg, sig) && validate(c)) return c;
    }
    for (const auto& a : anchors_) {
        if (verify(a.subject_public_key, msg, sig)) return a;
    }
    return std::nullopt;
}

}  // namespace vpki
