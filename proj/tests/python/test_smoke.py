import numpy as np
import pytest

import palmdt


def test_single_triangle_features():
    tri = palmdt.delaunay([(0, 0), (4, 0), (0, 3)])
    assert tri.triangles == [[0, 1, 2]]
    fv = palmdt.extract_features(tri)
    assert fv.triangle_count == 1
    assert fv.da == [0, 0, 0, 1, 0]
    assert len(fv.flatten()) == 21


def test_errors_surface_as_value_errors():
    with pytest.raises(palmdt.PalmError, match="insufficient sites"):
        palmdt.delaunay([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        palmdt.sorensen([0, 0], [0, 0])


def test_sorensen_known_value():
    assert palmdt.sorensen([2, 1], [1, 3]) == pytest.approx(3 / 7, abs=0)


def test_image_pipeline_on_rendered_sample():
    image, truth = palmdt.render_sample(palmdt.generate_template(5), palmdt.SampleParams(), 1)
    assert image.dtype == np.uint8 and image.shape == (128, 128)
    mask = palmdt.niblack_binarize(image)
    assert mask.dtype == np.bool_ and mask.any()
    skeleton = palmdt.clean(palmdt.skeletonize(mask))
    ends = palmdt.detect_endpoints(skeleton)
    assert len(ends) >= 3
    fv = palmdt.extract_image_features(image)
    assert fv == palmdt.extract_image_features(image)
    assert fv.dl[4] == 0 and fv.da[4] == 0 and fv.dc[4] == 0


def test_identify_and_knn():
    a = palmdt.extract_image_features(palmdt.render_sample(palmdt.generate_template(1), seed=1)[0])
    b = palmdt.extract_image_features(palmdt.render_sample(palmdt.generate_template(2), seed=1)[0])
    gallery = [("one", "0", a), ("two", "0", b)]
    ranked = palmdt.identify(a, gallery)
    assert ranked[0] == ("one", "0", 0.0)
    assert palmdt.knn_classify(a, gallery, k=1) == "one"
    assert palmdt.weighted_score(a, b).total > 0


def test_evaluate_small_corpus(tmp_path):
    manifest = palmdt.generate_corpus(str(tmp_path), 3, 2, seed=3)
    assert len(manifest["subjects"]) == 3
    config = palmdt.Config()
    nb = config.niblack
    nb.window = 41
    config.niblack = nb
    report = palmdt.evaluate(str(tmp_path), config)
    assert report["total"] == 6
    assert 0.0 <= report["rate"] <= 1.0
    assert report["config"]["niblack"]["window"] == 41
