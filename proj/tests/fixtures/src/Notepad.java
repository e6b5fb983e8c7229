public class Notepad implements Runnable {
    Node g, h, p, q;
    Thread t, s;
    boolean b1, b2;

    public Notepad() {
        g = new Node();
        g.token = true;
        h = new Node();
        h.token = true;
        p = g.addNode();
        q = h.addNode();
    }

    public void start() {
        t = new Thread(this);
        s = new Thread(this);
        t.start();
        s.start();
    }

    public void run() {
        while (true) {
            Thread ct = Thread.currentThread();
            if (ct == t) {
                p = p.MoveNext();
            } else if (ct == s) {
                q = q.MoveBack();
            }
            try {
                if (ct == t) {
                    Thread.sleep(2000);
                } else if (ct == s) {
                    Thread.sleep(1000);
                }
            } catch (InterruptedException ie) {}
        }
    }

    public void actionPerformed() {
        boolean p1 = p.token;
        boolean p2 = q.token;
        if (p1) p2 = false;
        if (p1 && p2) {
            X(10);
        } else
            save();
    }

    private void save() {
        System.out.println("save");
    }

    private void X(int k){
        int i, j;
        for(i = 0; i < 10 ; i++)
            for(j = 0; j < 10 ; j++) k+=i*10+j;
        System.out.println("k = " + k);
        for(i = 0; i < 20 ; i++)
            for(j = 0; j < 30 ; j++) k+=i*3-j;
        System.out.println("k = " + k);
        for(i = 0; i < 25 ; i++)
            for(j = 0; j < 20 ; j++) k+=i*4-j*3;
        System.out.println("k = " + k);
        // carrier capacity extension
        for(i = 0; i < 10 ; i++){
            for(j = 0; j < 10 ; j++){
                k = k * 10 + i * 20 + j * 30;
            }
            for(j = 0; j < 50 ; j++){
                k+=j*3;
            }
        }
        System.out.println("k = " + k);
    }

    public static void main(String[] args) {
        new Notepad().actionPerformed();
    }
}
