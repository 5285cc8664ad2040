#include "creditnet/hash.hpp"

#include "creditnet/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace creditnet {

namespace {

class Digest {
public:
    Digest() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error(ErrorKind::io, "sha256 unavailable");
    }

    void update(void const* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }

    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string text;
        text.reserve(len * 2);
        for (unsigned int i = 0; i < len; ++i) {
            text.push_back(digits[out[i] >> 4]);
            text.push_back(digits[out[i] & 0xf]);
        }
        return text;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data)
{
    Digest d;
    d.update(data.data(), data.size());
    return d.hex();
}

std::string sha256_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    Digest d;
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        d.update(buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    return d.hex();
}

}  // namespace creditnet
