"""이분 네트워크(사용자-객체) 추천 및 CSI 실험 패키지"""

__version__ = "1.0.0"
