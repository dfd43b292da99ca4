"""Writes data/embeddings.txt: small word vectors in the textual word2vec format.

Words in one cluster share a direction plus noise; unrelated words are
random vectors kept away from every cluster direction.
"""

import pathlib
import sys

import numpy as np

DIM = 24

CLUSTERS = {
    "clothes": [
        "clothes", "clothing", "garment", "garments", "apparel", "attire", "outfit",
        "wear", "wearing", "wore", "worn", "dressed", "shirt", "shirts", "t-shirt",
        "pants", "jeans", "shorts", "skirt", "trousers", "dockers", "jacket", "coat",
        "sweater", "sweatshirt", "hoodie", "blouse", "dress", "hat", "cap", "boots",
        "shoes", "sneakers", "top", "tank", "vest", "uniform", "scarf",
    ],
    "color": [
        "red", "blue", "green", "yellow", "black", "white", "grey", "gray", "brown",
        "pink", "purple", "orange", "navy", "tan", "beige", "maroon", "dark", "light",
    ],
    "person": [
        "person", "man", "woman", "boy", "girl", "male", "female", "guy", "victim",
        "suspect", "she", "he", "her", "him", "asian", "hispanic", "caucasian",
    ],
    "vehicle": [
        "car", "truck", "bicycle", "bike", "motorcycle", "van", "bus", "riding",
        "drove", "driving",
    ],
    "place": [
        "street", "st", "avenue", "park", "station", "store", "corner", "road",
        "vernon", "elm",
    ],
}

OTHER = [
    "the", "a", "an", "and", "with", "was", "were", "is", "had", "has", "seen",
    "last", "in", "on", "at", "of", "weather", "cold", "warm", "ran", "fast",
    "walked", "carried", "bag", "phone", "said", "reported", "medium", "build",
    "tall", "short", "hair", "word", "love", "written", "across", "chest",
    "morning", "night", "police", "called", "missing", "around", "about",
]


def main() -> int:
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/embeddings.txt")
    rng = np.random.default_rng(20240611)
    centers = {name: np.eye(DIM)[k] for k, name in enumerate(CLUSTERS)}
    vectors = {}
    for name, words in CLUSTERS.items():
        for w in words:
            noise = rng.normal(size=DIM)
            noise /= np.linalg.norm(noise)
            vectors[w] = centers[name] + 0.45 * noise
    for w in OTHER:
        while True:
            v = rng.normal(size=DIM)
            v /= np.linalg.norm(v)
            if all(abs(v @ c) < 0.25 for c in centers.values()):
                break
        vectors[w] = v
    # sanity: clothing words stay close to "clothes", other words do not
    def cos(a, b):
        return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

    anchor = vectors["clothes"]
    for w, v in vectors.items():
        inside = w in CLUSTERS["clothes"]
        c = cos(anchor, v)
        if inside and c <= 0.5:
            raise SystemExit(f"{w}: cosine {c:.3f} too low")
        if not inside and c >= 0.5:
            raise SystemExit(f"{w}: cosine {c:.3f} too high")
    lines = [f"{len(vectors)} {DIM}"]
    for w, v in vectors.items():
        lines.append(w + " " + " ".join(f"{x:.6f}" for x in v))
    out.write_text("\n".join(lines) + "\n")
    print(f"{len(vectors)} vectors -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
