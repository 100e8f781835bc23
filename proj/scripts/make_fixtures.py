#!/usr/bin/env python3
"""Regenerates the synthetic test fixtures.

Produces the 12-sample dataset (2 per category, drawn programmatically),
a fully stored offline run (generated hop images, summaries, detections),
the embedding store, the photographic-statistics images used by the
BRISQUE tests, the golden BRISQUE vectors/scores, and the default SVR
model. Everything is deterministic (fixed seeds).
"""

import hashlib
import json
import os
import sys

import numpy as np
from PIL import Image, ImageDraw
from scipy.ndimage import gaussian_filter

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests", "oracle"))
import brisque_reference as br

ROOT = os.path.join(os.path.dirname(__file__), "..")
DATA = os.path.join(ROOT, "tests", "data")
SIZE = 128  # fixture images are already square at the eval side

rng = np.random.default_rng(20240817)


def save(img_arr, path):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    Image.fromarray(np.clip(img_arr, 0, 255).astype(np.uint8)).save(path)


def sha256(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


# ---------------------------------------------------------------- dataset

CATEGORIES = ["cartoon", "nature", "painting", "product", "animal", "human"]

PALETTE = {
    "cartoon": (250, 220, 120),
    "nature": (110, 180, 120),
    "painting": (180, 140, 190),
    "product": (210, 210, 215),
    "animal": (200, 170, 130),
    "human": (230, 200, 180),
}


def draw_base(category, variant):
    img = Image.new("RGB", (SIZE, SIZE), PALETTE[category])
    d = ImageDraw.Draw(img)
    # horizon / backdrop texture so images are not flat
    for i in range(0, SIZE, 8):
        shade = tuple(max(0, c - (i // 8) * 3 - variant * 5) for c in PALETTE[category])
        d.line([(0, i), (SIZE, i)], fill=shade)
    return img


# Per-sample definition: (elements, hop count). Element: (label, bbox, color, shape)
SAMPLES = {
    "cartoon_01": ([("panther", (20, 40, 50, 60), (230, 80, 160), "ellipse"),
                    ("hat", (30, 20, 30, 18), (40, 40, 60), "rect")], 3),
    "cartoon_02": ([("robot", (60, 50, 40, 60), (120, 130, 150), "rect"),
                    ("star", (15, 15, 20, 20), (250, 240, 90), "ellipse"),
                    ("star", (95, 12, 18, 18), (250, 240, 90), "ellipse")], 2),
    "nature_01": ([("tree", (15, 30, 35, 70), (40, 110, 50), "ellipse"),
                   ("sun", (90, 12, 24, 24), (250, 210, 70), "ellipse"),
                   ("lake", (50, 95, 70, 28), (70, 120, 200), "rect")], 3),
    "nature_02": ([("mountain", (10, 20, 60, 60), (120, 120, 130), "triangle"),
                   ("cloud", (80, 15, 36, 18), (245, 245, 245), "ellipse")], 1),
    "painting_01": ([("vase", (50, 60, 28, 50), (90, 60, 130), "ellipse"),
                     ("flower", (54, 34, 20, 26), (220, 90, 110), "ellipse")], 5),
    "painting_02": ([("frame", (8, 8, 112, 112), (100, 70, 40), "outline"),
                     ("boat", (40, 70, 44, 22), (150, 90, 60), "rect")], 2),
    "product_01": ([("bottle", (52, 35, 22, 62), (60, 140, 90), "rect"),
                    ("label", (54, 58, 18, 16), (240, 240, 240), "rect"),
                    ("package", (90, 70, 28, 30), (190, 150, 110), "rect")], 2),
    "product_02": ([("phone", (46, 30, 36, 70), (30, 30, 35), "rect"),
                    ("screen", (50, 36, 28, 50), (90, 160, 220), "rect")], 4),
    "animal_01": ([("dog", (30, 60, 44, 36), (140, 100, 60), "ellipse"),
                   ("ball", (90, 84, 18, 18), (220, 60, 60), "ellipse"),
                   ("bone", (14, 96, 24, 10), (240, 235, 220), "rect"),
                   ("tree", (96, 18, 22, 40), (50, 120, 60), "ellipse")], 4),
    "animal_02": ([("cat", (40, 52, 40, 34), (110, 110, 115), "ellipse"),
                   ("mouse", (96, 92, 16, 10), (150, 150, 150), "ellipse")], 2),
    "human_01": ([("girl", (48, 34, 28, 64), (210, 160, 140), "ellipse"),
                  ("dress", (46, 64, 32, 34), (240, 240, 250), "rect"),
                  ("snow", (0, 100, 128, 28), (250, 250, 252), "rect")], 3),
    "human_02": ([("man", (30, 30, 26, 70), (190, 150, 130), "ellipse"),
                  ("bike", (66, 72, 44, 28), (70, 70, 80), "rect"),
                  ("helmet", (32, 22, 20, 12), (200, 40, 40), "ellipse")], 5),
}

SOURCES = {
    "cartoon_01": "unique", "cartoon_02": "pinterest",
    "nature_01": "unique", "nature_02": "flickr",
    "painting_01": "pinterest", "painting_02": "unique",
    "product_01": "unique", "product_02": "flickr",
    "animal_01": "unique", "animal_02": "unique",
    "human_01": "unique", "human_02": "pinterest",
}


def draw_elements(img, elements, upto=None):
    d = ImageDraw.Draw(img)
    subset = elements if upto is None else elements[:upto]
    for label, (x, y, w, h), color, shape in subset:
        if shape == "ellipse":
            d.ellipse([x, y, x + w, y + h], fill=color)
        elif shape == "rect":
            d.rectangle([x, y, x + w, y + h], fill=color)
        elif shape == "triangle":
            d.polygon([(x, y + h), (x + w // 2, y), (x + w, y + h)], fill=color)
        elif shape == "outline":
            d.rectangle([x, y, x + w, y + h], outline=color, width=4)
    return img


def make_dataset():
    ds_root = os.path.join(DATA, "dataset")
    os.makedirs(os.path.join(ds_root, "images"), exist_ok=True)
    manifest = {"schema_version": 1, "samples": []}
    for sid, (elements, hops) in SAMPLES.items():
        category = sid.rsplit("_", 1)[0]
        variant = int(sid.rsplit("_", 1)[1])
        img = draw_base(category, variant)
        draw_elements(img, elements)
        rel = f"images/{sid}.png"
        img.save(os.path.join(ds_root, rel))

        labels = [e[0] for e in elements]
        chats = []
        for k in range(1, hops + 1):
            mentioned = labels[min(k, len(labels)) - 1]
            chats.append({
                "joe": f"What can you tell me about the image at step {k}?",
                "jill": f"There is a {mentioned} in the {category} scene.",
            })
        llm_desc = [
            f"A {category} scene with " + ", ".join(labels[: min(k, len(labels))]) + "."
            for k in range(1, hops + 1)
        ]
        manifest["samples"].append({
            "id": sid,
            "category": category,
            "source": SOURCES[sid],
            "image": rel,
            "elements": [{"label": lab, "bbox": list(box)} for lab, box, _, _ in elements],
            "chats": chats,
            "llm_desc": llm_desc,
        })
    with open(os.path.join(ds_root, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return ds_root


# ---------------------------------------------------------------- offline run


def make_run(ds_root):
    run_dir = os.path.join(DATA, "runs", "fixture")
    for sid, (elements, hops) in SAMPLES.items():
        category = sid.rsplit("_", 1)[0]
        variant = int(sid.rsplit("_", 1)[1])
        sdir = os.path.join(run_dir, sid)
        os.makedirs(sdir, exist_ok=True)
        labels = [e[0] for e in elements]
        gt_path = os.path.join(ds_root, f"images/{sid}.png")
        srng = np.random.default_rng(abs(hash(sid)) % (2**32))
        for k in range(1, hops + 1):
            with open(os.path.join(sdir, f"summary_{k}.txt"), "w") as f:
                f.write(f"A {category} scene with " +
                        ", ".join(labels[: min(k, len(labels))]) + ".")

            hop_png = os.path.join(sdir, f"hop_{k}.png")
            if sid == "nature_01" and k == hops:
                # identity fixture: final hop is a byte copy of the ground truth
                open(hop_png, "wb").write(open(gt_path, "rb").read())
            else:
                img = draw_base(category, variant)
                n_elems = min(k, len(labels))
                draw_elements(img, elements, upto=n_elems)
                arr = np.asarray(img, dtype=np.float64)
                noise_sigma = 24.0 / k  # noise shrinks as the conversation progresses
                arr = arr + srng.normal(0, noise_sigma, arr.shape)
                save(arr, hop_png)

            # detections for the generated image (standardized = native 128px)
            n_present = min(k, len(labels))
            instances = []
            for i in range(n_present):
                label, (x, y, w, h), _, _ = elements[i]
                jitter = max(0, (hops - k)) * 2
                instances.append({
                    "label": label,
                    "score": 0.9,
                    "bbox": [x + jitter, y + jitter, w, h],
                })
            if k == 1 and len(labels) > 1 and sid != "animal_01":
                # early-hop spurious object, below and above the 0.7 threshold
                instances.append({"label": "blob", "score": 0.95,
                                  "bbox": [4, 4, 12, 12]})
                instances.append({"label": "ghost", "score": 0.3,
                                  "bbox": [100, 100, 10, 10]})
            if sid == "nature_01" and k == hops:
                # identity hop: detections mirror the ground-truth annotation
                instances = [{"label": lab, "score": 0.99, "bbox": list(box)}
                             for lab, box, _, _ in elements]
            with open(os.path.join(sdir, f"det_{k}.json"), "w") as f:
                json.dump({
                    "image_id": f"{sid}@{k}",
                    "origin": "detr-100-fixture",
                    "instances": instances,
                }, f, indent=2)
                f.write("\n")
    return run_dir


# ---------------------------------------------------------------- embeddings


def make_embeddings(ds_root, run_dir):
    dim = 8
    model_id = "fixture-clip-v1"
    lines = {}

    def unit(v):
        return v / np.linalg.norm(v)

    for sid, (elements, hops) in SAMPLES.items():
        gt_path = os.path.join(ds_root, f"images/{sid}.png")
        erng = np.random.default_rng(abs(hash("emb" + sid)) % (2**32))
        v_gt = unit(erng.normal(size=dim))
        u0 = unit(erng.normal(size=dim))
        lines[sha256(gt_path)] = v_gt
        for k in range(1, hops + 1):
            hop_path = os.path.join(run_dir, sid, f"hop_{k}.png")
            h = sha256(hop_path)
            if h in lines:   # byte-identical to ground truth
                continue
            t = k / hops
            lines[h] = unit((1 - t) * u0 + t * v_gt)

    with open(os.path.join(DATA, "embeddings.store"), "w") as f:
        f.write("# sha256  model_id  dim  values...\n")
        for h in sorted(lines):
            vec = " ".join(f"{x:.12g}" for x in lines[h])
            f.write(f"{h}  {model_id}  {dim}  {vec}\n")


# ---------------------------------------------------------------- photos


def natural_image(seed, size=256):
    """Multi-scale filtered noise: roughly natural second-order statistics."""
    r = np.random.default_rng(seed)
    img = np.zeros((size, size))
    for scale, weight in [(2, 0.2), (8, 0.5), (32, 1.0), (64, 1.5)]:
        layer = gaussian_filter(r.normal(size=(size, size)), scale)
        layer /= layer.std() + 1e-12
        img += weight * layer
    img += 0.3 * r.normal(size=(size, size))  # sensor-like noise floor
    img -= img.min()
    img /= img.max()
    return (img * 235 + 10)


def make_photos():
    photos_dir = os.path.join(DATA, "photos")
    os.makedirs(photos_dir, exist_ok=True)
    paths = []
    for i in range(1, 4):
        arr = natural_image(1000 + i)
        rgb = np.stack([arr, arr, arr], axis=-1)
        p = os.path.join(photos_dir, f"photo{i}.png")
        save(rgb, p)
        paths.append(p)
    # blur ladder off photo1 (radius 0 is photo1 itself)
    base = np.asarray(Image.open(paths[0]).convert("L"), dtype=np.float64)
    for radius in (1, 2, 4):
        blurred = gaussian_filter(base, radius)
        save(np.stack([blurred] * 3, axis=-1), os.path.join(photos_dir, f"photo1_blur{radius}.png"))
    return paths


# ---------------------------------------------------------------- SVR model


def degradations(base):
    """(image, severity in [0, 1]) pairs for one clean photo."""
    out = [(base, 0.0)]
    for s in (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0):
        out.append((gaussian_filter(base, s), min(1.0, s / 5.0)))
    r = np.random.default_rng(int(base.sum()) % (2**32))
    for n in (5.0, 10.0, 20.0, 40.0):
        out.append((np.clip(base + r.normal(0, n, base.shape), 0, 255), min(1.0, n / 40.0)))
    for s, n in ((1.0, 10.0), (2.0, 20.0)):
        img = gaussian_filter(base, s)
        out.append((np.clip(img + r.normal(0, n, img.shape), 0, 255),
                    min(1.0, (s / 5.0 + n / 40.0) / 1.5)))
    return out


def train_model(photo_paths):
    from sklearn.svm import SVR

    feats, targets = [], []
    for p in photo_paths:
        base = br.luma(p)
        for img, severity in degradations(base):
            feats.append(br.brisque_features(img))
            targets.append(10.0 + 80.0 * severity)
    feats = np.array(feats)
    targets = np.array(targets)

    lo = feats.min(axis=0)
    hi = feats.max(axis=0)
    pad = 0.05 * (hi - lo) + 1e-9  # headroom so unseen images stay in range
    lo -= pad
    hi += pad
    scaled = -1.0 + 2.0 * (feats - lo) / (hi - lo)

    gamma = 0.05
    svr = SVR(kernel="rbf", C=200.0, epsilon=1.0, gamma=gamma)
    svr.fit(scaled, targets)

    model_path = os.path.join(ROOT, "assets", "brisque_svr.txt")
    os.makedirs(os.path.dirname(model_path), exist_ok=True)
    with open(model_path, "w") as f:
        f.write("# BRISQUE RBF-SVR model\n")
        f.write("GAMMA\n%.12g\n" % gamma)
        f.write("RHO\n%.12g\n" % (-svr.intercept_[0]))
        f.write("RANGES\n")
        for i in range(36):
            f.write("%.12g %.12g\n" % (lo[i], hi[i]))
        f.write("SV\n")
        for coef, sv in zip(svr.dual_coef_[0], svr.support_vectors_):
            f.write("%.12g " % coef + " ".join("%.12g" % v for v in sv) + "\n")
    return model_path


# ---------------------------------------------------------------- goldens


def make_goldens(photo_paths, model_path):
    golden = os.path.join(DATA, "golden")
    os.makedirs(golden, exist_ok=True)
    model = br.load_model(model_path)
    scores = {}
    for i, p in enumerate(photo_paths, 1):
        f = br.brisque_features(br.luma(p))
        with open(os.path.join(golden, f"brisque_features_photo{i}.txt"), "w") as out:
            out.write("\n".join("%.12g" % v for v in f) + "\n")
        scores[f"photo{i}"] = br.score(p, model)
    with open(os.path.join(golden, "brisque_scores.txt"), "w") as out:
        for name in sorted(scores):
            out.write(f"{name} {scores[name]:.9g}\n")

    ladder = [br.score(os.path.join(DATA, "photos", "photo1.png"), model)]
    for radius in (1, 2, 4):
        ladder.append(br.score(os.path.join(DATA, "photos", f"photo1_blur{radius}.png"), model))
    print("blur ladder scores:", ladder)
    assert all(b > a for a, b in zip(ladder, ladder[1:])), "blur ladder not monotone"


# ---------------------------------------------------------------- misc


def make_misc():
    misc = os.path.join(DATA, "misc")
    os.makedirs(misc, exist_ok=True)
    # 16-bit grayscale PNG whose max sample is 65535
    arr = np.array([[0, 16384], [32768, 65535]], dtype=np.uint32)
    Image.fromarray(arr.astype(np.int32), mode="I").save(os.path.join(misc, "gray16.png"))
    # truncated PNG
    full = open(os.path.join(DATA, "photos", "photo1.png"), "rb").read()
    open(os.path.join(misc, "truncated.png"), "wb").write(full[: len(full) // 2])
    # RGBA PNG: red at alpha 0, 128, 255 plus opaque black
    rgba = np.array([[[255, 0, 0, 0], [255, 0, 0, 128]],
                     [[255, 0, 0, 255], [0, 0, 0, 255]]], dtype=np.uint8)
    Image.fromarray(rgba, mode="RGBA").save(os.path.join(misc, "rgba.png"))
    # small valid PNG (2x2)
    save(np.array([[[255, 0, 0], [0, 255, 0]], [[0, 0, 255], [255, 255, 255]]],
                  dtype=np.float64), os.path.join(misc, "tiny.png"))


if __name__ == "__main__":
    ds_root = make_dataset()
    run_dir = make_run(ds_root)
    make_embeddings(ds_root, run_dir)
    photos = make_photos()
    model = train_model(photos)
    make_goldens(photos, model)
    make_misc()
    print("fixtures written under", DATA)
