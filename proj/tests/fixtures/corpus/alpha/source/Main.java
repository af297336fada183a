// entry point
public class Main {
    public static int grade(int score, boolean strict) {
        if (score > 90 || (!strict && score > 85)) {
            return 1;
        }
        switch (score / 10) {
            case 9:
                return 1;
            case 8:
                return 2;
            default:
                return 3;
        }
    }

    public static int route(int x) {
        switch (x) {
            case 0: return 0;
            case 1: return 1;
            case 2: return 2;
            case 3: return 3;
            case 4: return 4;
            case 5: return 5;
            case 6: return 6;
            case 7: return 7;
            case 8: return 8;
            case 9: return 9;
            default: return -1;
        }
    }

    public static void main(String[] args) {
        int g = grade(args.length, true);
        System.out.println("grade: " + g);
    }
}
